/*
 * Copyright 2026 The maculavae Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "commands.hpp"

#include <iomanip>
#include <iostream>
#include <sstream>
#include <system_error>

#include <CLI11.hpp>

#include "maculavae/clustering.hpp"
#include "maculavae/errors.hpp"
#include "maculavae/reporting.hpp"
#include "maculavae/text_io.hpp"
#include "maculavae/trainer.hpp"
#include "maculavae/vae.hpp"

namespace maculavae::cli {

namespace fs = std::filesystem;

namespace {

void require_input(const fs::path& path, const char* what)
{
    std::error_code ec;
    if (!fs::is_regular_file(path, ec)) {
        throw Error(std::string(what) + " '" + path.string() + "' does not exist");
    }
}

void ensure_parent(const fs::path& file)
{
    const auto dir = file.parent_path();
    if (dir.empty()) {
        return;
    }
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw Error("cannot create output directory '" + dir.string() + "'");
    }
}

void write_output(const fs::path& path, std::string_view contents)
{
    ensure_parent(path);
    text::write_file(path, contents);
}

std::string fmt(double v)
{
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

fs::path with_suffix(const fs::path& path, const std::string& suffix)
{
    auto name = path.stem().string() + suffix + path.extension().string();
    return path.parent_path() / name;
}

} // namespace

fs::path cohort_path(const PipelineConfig& config)
{
    return config.paths.cohort.value_or(config.paths.out / "cohort.csv");
}

fs::path weights_path(const PipelineConfig& config)
{
    return config.paths.weights.value_or(config.paths.out / "weights.json");
}

fs::path latents_path(const PipelineConfig& config)
{
    return config.paths.latents.value_or(config.paths.out / "latents.csv");
}

fs::path assignments_path(const PipelineConfig& config)
{
    return config.paths.assignments.value_or(config.paths.out / "assignments.csv");
}

void cmd_generate(const PipelineConfig& config, std::ostream& out)
{
    config.validate();
    const Cohort cohort =
        generate_cohort(config.data.models, config.data.per_disease_count, config.data.seed);
    const DataModelFigures figures = export_data_model_figures(config.data.models);

    const auto path = cohort_path(config);
    write_output(path, cohort_to_csv(cohort));
    const auto fig_dir = config.paths.out / "data_model";
    write_output(fig_dir / "race_distribution.csv", race_table_csv(figures));
    write_output(fig_dir / "findings.csv", findings_csv(figures));
    write_output(fig_dir / "age_density.csv", age_density_csv(figures));

    out << "wrote " << cohort.records.size() << " records to " << path.string() << '\n';
}

void cmd_train(const PipelineConfig& config, const TrainRequest& request, std::ostream& out,
               std::ostream& log)
{
    config.validate();
    const auto input = cohort_path(config);
    require_input(input, "cohort file");
    const Cohort cohort = read_cohort(input);
    if (cohort.records.empty()) {
        throw Error("cohort file '" + input.string() + "' has no records");
    }
    TrainConfig train_config = config.train;
    train_config.age_cap = config.data.age_cap;
    train_config.validate(cohort.records.size());

    int current_dim = train_config.latent_dim;
    EpochCallback on_epoch;
    if (request.log_every > 0) {
        on_epoch = [&](const EpochLoss& e) {
            if (e.epoch == 1 || e.epoch % request.log_every == 0 || e.epoch == train_config.epochs) {
                log << "[J=" << current_dim << "] epoch " << e.epoch << '/' << train_config.epochs
                    << " total=" << fmt(e.total) << " kl=" << fmt(e.kl) << " recon=" << fmt(e.recon)
                    << '\n';
            }
        };
    }

    if (!request.compare_dims) {
        const TrainResult result = train(cohort, train_config, on_epoch);
        const auto wpath = weights_path(config);
        write_output(wpath, weights_to_json(result.params));
        write_output(config.paths.out / "loss_history.csv", loss_history_to_csv(result.history));
        const auto& last = result.history.back();
        out << "final loss: total=" << fmt(last.total) << " kl=" << fmt(last.kl)
            << " recon=" << fmt(last.recon) << '\n';
        out << "wrote " << wpath.string() << '\n';
        return;
    }

    if (request.dims.empty()) {
        throw ConfigError("--dims must name at least one latent dimension");
    }
    std::vector<LatentDimRun> runs;
    for (int dim : request.dims) {
        current_dim = dim;
        auto one = compare_latent_dims(cohort, train_config, {dim}, on_epoch);
        runs.push_back(std::move(one.front()));
    }
    const auto observations = observe_latent_dims(runs);
    const auto wpath = weights_path(config);
    for (const auto& run : runs) {
        const std::string suffix = "_J" + std::to_string(run.latent_dim);
        write_output(with_suffix(wpath, suffix), weights_to_json(run.result.params));
        write_output(config.paths.out / ("loss_history" + suffix + ".csv"),
                     loss_history_to_csv(run.result.history));
    }
    const std::string report = latent_dim_report(observations);
    write_output(config.paths.out / "latent_dim_comparison.csv", report);
    out << report;
}

void cmd_infer(const PipelineConfig& config, std::optional<int> expected_latent_dim,
               std::ostream& out)
{
    config.validate();
    const auto wpath = weights_path(config);
    const auto cpath = cohort_path(config);
    require_input(wpath, "weights file");
    require_input(cpath, "cohort file");
    const VaeParams params = load_weights(wpath);
    if (expected_latent_dim && *expected_latent_dim != params.latent_dim) {
        throw ConfigError("weights file has latent_dim " + std::to_string(params.latent_dim)
                          + " but --latent-dim " + std::to_string(*expected_latent_dim)
                          + " was requested");
    }
    const Cohort cohort = read_cohort(cpath);
    const auto latents = infer_latents(params, cohort, config.data.age_cap);
    const auto lpath = latents_path(config);
    write_output(lpath, latents_to_csv(latents));
    out << "wrote " << latents.size() << " latent points (J=" << params.latent_dim << ") to "
        << lpath.string() << '\n';
}

void cmd_cluster(const PipelineConfig& config, std::ostream& out)
{
    config.validate();
    const auto lpath = latents_path(config);
    require_input(lpath, "latents file");
    auto latents = read_latents(lpath);
    const Eigen::MatrixXd points = latent_matrix(latents);
    const auto& c = config.cluster;
    if (static_cast<Eigen::Index>(latents.size()) < c.k) {
        throw InfeasibleError("k=" + std::to_string(c.k) + " exceeds the number of points ("
                              + std::to_string(latents.size()) + ")");
    }
    const KmeansResult result = kmeans_best_of(points, c.k, c.seed, c.restarts, c.max_iter, c.tol);
    const auto elbow = elbow_curve(points, c.elbow_max_k, c.seed, c.restarts, c.max_iter, c.tol);
    assign_clusters(latents, result);

    const auto apath = assignments_path(config);
    write_output(apath, latents_to_csv(latents));
    write_output(config.paths.out / "centroids.csv", centroids_to_csv(result.centroids));
    write_output(config.paths.out / "elbow.csv", elbow_to_csv(elbow));
    out << "k=" << c.k << " inertia=" << fmt(result.inertia) << " iterations=" << result.iterations
        << (result.converged ? " (converged)" : " (max_iter reached)") << '\n';
    out << "wrote " << apath.string() << '\n';
}

void cmd_report(const PipelineConfig& config, ReportFormat format, std::ostream& out,
                std::ostream& log)
{
    config.validate();
    const auto cpath = cohort_path(config);
    const auto apath = assignments_path(config);
    require_input(cpath, "cohort file");
    require_input(apath, "assignments file");
    const Cohort cohort = read_cohort(cpath);
    const auto latents = read_latents(apath);

    const auto summaries = summarize_clusters(cohort, latents);
    if (summaries.empty()) {
        throw Error("no clustered points to report on");
    }
    int k = config.cluster.k;
    for (const auto& p : latents) {
        k = std::max(k, *p.cluster + 1);
    }
    for (int empty : empty_clusters(latents, k)) {
        log << "warning: cluster " << empty + 1 << " is empty and omitted from the report\n";
    }
    const PurityReport purity = purity_stats(summaries);
    const ScatterExport scatter = export_latent_scatter(latents);

    std::string report;
    std::string purity_out;
    fs::path report_file;
    fs::path purity_file;
    if (format == ReportFormat::Csv) {
        report = cluster_report_csv(summaries);
        purity_out = purity_csv(purity);
        report_file = config.paths.out / "cluster_report.csv";
        purity_file = config.paths.out / "purity.csv";
    } else {
        report = cluster_report_table(summaries);
        purity_out = purity_text(purity);
        report_file = config.paths.out / "cluster_report.txt";
        purity_file = config.paths.out / "purity.txt";
    }

    write_output(report_file, report);
    write_output(purity_file, purity_out);
    ensure_parent(config.paths.out / "scatter" / "x");
    write_latent_scatter(config.paths.out / "scatter", scatter);

    out << report << '\n' << purity_out;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Synthetic maculopathy cohort, VAE training, latent clustering and reports",
                 "maculavae"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_file;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<std::string> cohort_file;
    std::optional<std::string> weights_file;
    std::optional<std::string> latents_file;
    std::optional<std::string> assignments_file;
    app.add_option("--config", config_file, "JSON pipeline config");
    app.add_option("--seed", seed, "Seed for the stage being run");
    app.add_option("--out", out_dir, "Output directory");
    app.add_option("--cohort", cohort_file, "Cohort CSV path");
    app.add_option("--weights", weights_file, "Weights JSON path");
    app.add_option("--latents", latents_file, "Latents CSV path");
    app.add_option("--assignments", assignments_file, "Clustered latents CSV path");

    auto* generate = app.add_subcommand("generate", "Sample a synthetic cohort");
    std::optional<std::size_t> per_disease;
    generate->add_option("--per-disease", per_disease, "Records per disease");

    std::optional<int> latent_dim;
    std::optional<int> epochs;
    std::optional<int> batch_size;
    std::optional<double> learning_rate;
    std::optional<int> hidden_dim;
    std::vector<int> dims{2, 3, 4};
    bool compare = false;
    int log_every = 10;
    auto add_train_options = [&](CLI::App* cmd) {
        cmd->add_option("--latent-dim", latent_dim, "Latent dimension J");
        cmd->add_option("--epochs", epochs, "Training epochs");
        cmd->add_option("--batch-size", batch_size, "Minibatch size");
        cmd->add_option("--learning-rate", learning_rate, "Adam learning rate");
        cmd->add_option("--hidden-dim", hidden_dim, "Hidden layer width");
        cmd->add_option("--dims", dims, "Latent sizes for a comparison run")->delimiter(',');
        cmd->add_option("--log-every", log_every, "Print every n-th epoch (0 = quiet)");
    };
    auto* train_cmd = app.add_subcommand("train", "Train the VAE on a cohort");
    add_train_options(train_cmd);
    train_cmd->add_flag("--compare-dims", compare, "Train one model per latent size in --dims");
    auto* compare_cmd = app.add_subcommand("compare-dims", "Train and compare latent sizes");
    add_train_options(compare_cmd);

    auto* infer = app.add_subcommand("infer", "Encode a cohort into latent means");
    infer->add_option("--latent-dim", latent_dim, "Expected latent dimension of the weights");

    auto* cluster = app.add_subcommand("cluster", "k-means on latent points");
    std::optional<int> k;
    std::optional<int> restarts;
    cluster->add_option("--k", k, "Number of clusters");
    cluster->add_option("--restarts", restarts, "Seeded k-means++ restarts");

    auto* report = app.add_subcommand("report", "Cluster characteristics and exports");
    std::string format = "table";
    report->add_option("--format", format, "csv or table")
        ->check(CLI::IsMember({"csv", "table"}));

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code;
    }

    try {
        PipelineConfig config =
            config_file.empty() ? default_pipeline_config() : load_pipeline_config(config_file);
        if (out_dir) {
            config.paths.out = *out_dir;
        }
        if (cohort_file) {
            config.paths.cohort = *cohort_file;
        }
        if (weights_file) {
            config.paths.weights = *weights_file;
        }
        if (latents_file) {
            config.paths.latents = *latents_file;
        }
        if (assignments_file) {
            config.paths.assignments = *assignments_file;
        }

        if (generate->parsed()) {
            if (seed) {
                config.data.seed = *seed;
            }
            if (per_disease) {
                config.data.per_disease_count = *per_disease;
            }
            cmd_generate(config, out);
        } else if (train_cmd->parsed() || compare_cmd->parsed()) {
            if (seed) {
                config.train.seed = *seed;
            }
            if (latent_dim) {
                config.train.latent_dim = *latent_dim;
            }
            if (epochs) {
                config.train.epochs = *epochs;
            }
            if (batch_size) {
                config.train.batch_size = *batch_size;
            }
            if (learning_rate) {
                config.train.learning_rate = *learning_rate;
            }
            if (hidden_dim) {
                config.train.hidden_dim = *hidden_dim;
            }
            TrainRequest request;
            request.compare_dims = compare || compare_cmd->parsed();
            request.dims = dims;
            request.log_every = log_every;
            cmd_train(config, request, out, err);
        } else if (infer->parsed()) {
            cmd_infer(config, latent_dim, out);
        } else if (cluster->parsed()) {
            if (seed) {
                config.cluster.seed = *seed;
            }
            if (k) {
                config.cluster.k = *k;
            }
            if (restarts) {
                config.cluster.restarts = *restarts;
            }
            cmd_cluster(config, out);
        } else if (report->parsed()) {
            cmd_report(config, format == "csv" ? ReportFormat::Csv : ReportFormat::Table, out, err);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

} // namespace maculavae::cli
