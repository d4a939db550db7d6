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

#include "maculavae/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "maculavae/errors.hpp"
#include "maculavae/random.hpp"
#include "maculavae/text_io.hpp"

namespace maculavae {

namespace {

// Stream ids under the train seed.
constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kTrainStream = 2;

void fill_glorot(LayerParams& layer, Rng& rng)
{
    const double fan_out = static_cast<double>(layer.weights.rows());
    const double fan_in = static_cast<double>(layer.weights.cols());
    const double a = std::sqrt(6.0 / (fan_in + fan_out));
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
        for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) {
            layer.weights(r, c) = a * (2.0 * rng.uniform_open() - 1.0);
        }
    }
    layer.bias.setZero();
}

} // namespace

void TrainConfig::validate(std::size_t cohort_size) const
{
    if (epochs < 1) {
        throw ConfigError("epochs must be at least 1");
    }
    if (batch_size < 1) {
        throw ConfigError("batch_size must be at least 1");
    }
    if (cohort_size > 0 && static_cast<std::size_t>(batch_size) > cohort_size) {
        throw ConfigError("batch_size exceeds cohort size");
    }
    if (!(learning_rate > 0.0)) {
        throw ConfigError("learning_rate must be positive");
    }
    if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
        throw ConfigError("Adam betas must lie in [0, 1)");
    }
    if (!(adam_eps > 0.0)) {
        throw ConfigError("adam_eps must be positive");
    }
    if (latent_dim < 1 || hidden_dim < 1) {
        throw ConfigError("latent_dim and hidden_dim must be at least 1");
    }
    if (!(age_cap > 0.0)) {
        throw ConfigError("age_cap must be positive");
    }
}

std::string loss_history_to_csv(const LossHistory& history)
{
    std::string out(kLossHistoryCsvHeader);
    out += '\n';
    for (const auto& e : history) {
        out += std::to_string(e.epoch);
        out += ',' + text::format_double(e.total);
        out += ',' + text::format_double(e.kl);
        out += ',' + text::format_double(e.recon);
        out += '\n';
    }
    return out;
}

VaeParams init_params(int latent_dim, int hidden_dim, std::uint64_t seed)
{
    VaeParams params = VaeParams::zeros(latent_dim, hidden_dim);
    Rng rng(seed, kInitStream);
    fill_glorot(params.enc_hidden, rng);
    fill_glorot(params.enc_head, rng);
    fill_glorot(params.dec_hidden, rng);
    fill_glorot(params.dec_out, rng);
    return params;
}

AdamState AdamState::zeros_like(const VaeParams& params)
{
    params.validate_shapes();
    AdamState state;
    state.first_moment = VaeParams::zeros(params.latent_dim, params.hidden_dim);
    state.second_moment = state.first_moment;
    return state;
}

void adam_step(VaeParams& params, const VaeGradients& grads, AdamState& state,
               const TrainConfig& config, long step_index)
{
    if (step_index < 1) {
        throw ConfigError("adam_step: step_index starts at 1");
    }
    params.validate_shapes();
    grads.validate_shapes();
    state.first_moment.validate_shapes();
    state.second_moment.validate_shapes();
    if (grads.latent_dim != params.latent_dim || grads.hidden_dim != params.hidden_dim
        || state.first_moment.latent_dim != params.latent_dim
        || state.first_moment.hidden_dim != params.hidden_dim
        || state.second_moment.latent_dim != params.latent_dim
        || state.second_moment.hidden_dim != params.hidden_dim) {
        throw ShapeError("adam_step: parameter, gradient and moment shapes differ");
    }

    const double b1 = config.adam_beta1;
    const double b2 = config.adam_beta2;
    const double t = static_cast<double>(step_index);
    const double correction1 = 1.0 - std::pow(b1, t);
    const double correction2 = 1.0 - std::pow(b2, t);
    const double lr = config.learning_rate;
    const double eps = config.adam_eps;

    auto update = [&](auto& p, auto& m, auto& v, const auto& g) {
        m.array() = b1 * m.array() + (1.0 - b1) * g.array();
        v.array() = b2 * v.array() + (1.0 - b2) * g.array().square();
        p.array() -= lr * (m.array() / correction1)
                     / ((v.array() / correction2).sqrt() + eps);
    };
    update(params.enc_hidden.weights, state.first_moment.enc_hidden.weights,
           state.second_moment.enc_hidden.weights, grads.enc_hidden.weights);
    update(params.enc_hidden.bias, state.first_moment.enc_hidden.bias,
           state.second_moment.enc_hidden.bias, grads.enc_hidden.bias);
    update(params.enc_head.weights, state.first_moment.enc_head.weights,
           state.second_moment.enc_head.weights, grads.enc_head.weights);
    update(params.enc_head.bias, state.first_moment.enc_head.bias,
           state.second_moment.enc_head.bias, grads.enc_head.bias);
    update(params.dec_hidden.weights, state.first_moment.dec_hidden.weights,
           state.second_moment.dec_hidden.weights, grads.dec_hidden.weights);
    update(params.dec_hidden.bias, state.first_moment.dec_hidden.bias,
           state.second_moment.dec_hidden.bias, grads.dec_hidden.bias);
    update(params.dec_out.weights, state.first_moment.dec_out.weights,
           state.second_moment.dec_out.weights, grads.dec_out.weights);
    update(params.dec_out.bias, state.first_moment.dec_out.bias,
           state.second_moment.dec_out.bias, grads.dec_out.bias);
}

void shuffle_order(std::vector<std::size_t>& order, Rng& rng)
{
    // Fisher-Yates with the portable bounded draw.
    for (std::size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[rng.below(i)]);
    }
}

TrainResult train(const Cohort& cohort, const TrainConfig& config, const EpochCallback& on_epoch)
{
    if (cohort.records.empty()) {
        throw ConfigError("cannot train on an empty cohort");
    }
    const std::size_t n = cohort.records.size();
    config.validate(n);

    Eigen::MatrixXd features(kInputDim, static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const FeatureVec x = encode_features(cohort.records[i], config.age_cap);
        for (int d = 0; d < kInputDim; ++d) {
            features(d, static_cast<Eigen::Index>(i)) = x[d];
        }
    }

    TrainResult result;
    result.params = init_params(config.latent_dim, config.hidden_dim, config.seed);
    result.history.reserve(static_cast<std::size_t>(config.epochs));
    AdamState state = AdamState::zeros_like(result.params);
    Rng rng(config.seed, kTrainStream);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});

    const std::size_t batch_size = static_cast<std::size_t>(config.batch_size);
    const int j = config.latent_dim;
    long step = 0;
    Eigen::MatrixXd batch_inputs;
    Eigen::MatrixXd batch_eps;
    BatchWorkspace workspace;
    BatchLoss batch;

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        if (config.shuffle_each_epoch) {
            shuffle_order(order, rng);
        }

        double total_sum = 0.0;
        double kl_sum = 0.0;
        double recon_sum = 0.0;
        std::size_t batch_index = 0;
        for (std::size_t start = 0; start < n; start += batch_size, ++batch_index) {
            const std::size_t count = std::min(batch_size, n - start);
            const auto cols = static_cast<Eigen::Index>(count);
            batch_inputs.resize(kInputDim, cols);
            batch_eps.resize(j, cols);
            for (std::size_t b = 0; b < count; ++b) {
                batch_inputs.col(static_cast<Eigen::Index>(b)) =
                    features.col(static_cast<Eigen::Index>(order[start + b]));
                for (int k = 0; k < j; ++k) {
                    batch_eps(k, static_cast<Eigen::Index>(b)) = rng.normal();
                }
            }

            try {
                batch_loss_and_gradients(result.params, batch_inputs, batch_eps, LossTerms::Full,
                                         workspace, batch);
            } catch (const NumericError&) {
                throw NumericError("non-finite loss at epoch " + std::to_string(epoch) + ", batch "
                                   + std::to_string(batch_index));
            }
            if (!batch.grads.all_finite()) {
                throw NumericError("non-finite gradient at epoch " + std::to_string(epoch)
                                   + ", batch " + std::to_string(batch_index));
            }
            const double weight = static_cast<double>(count);
            total_sum += batch.mean.total * weight;
            kl_sum += batch.mean.kl * weight;
            recon_sum += batch.mean.recon * weight;

            adam_step(result.params, batch.grads, state, config, ++step);
        }

        const double inv_n = 1.0 / static_cast<double>(n);
        EpochLoss entry{epoch, total_sum * inv_n, kl_sum * inv_n, recon_sum * inv_n};
        result.history.push_back(entry);
        if (on_epoch) {
            on_epoch(entry);
        }
    }
    return result;
}

std::vector<LatentDimRun> compare_latent_dims(const Cohort& cohort, const TrainConfig& base,
                                              const std::vector<int>& dims,
                                              const EpochCallback& on_epoch)
{
    if (dims.empty()) {
        throw ConfigError("compare_latent_dims: no latent dimensions given");
    }
    std::vector<LatentDimRun> runs;
    runs.reserve(dims.size());
    for (int dim : dims) {
        TrainConfig config = base;
        config.latent_dim = dim;
        runs.push_back({dim, train(cohort, config, on_epoch)});
    }
    return runs;
}

std::vector<LatentDimObservation> observe_latent_dims(const std::vector<LatentDimRun>& runs)
{
    std::vector<LatentDimObservation> out;
    for (const auto& run : runs) {
        const auto& h = run.result.history;
        if (h.empty()) {
            continue;
        }
        LatentDimObservation obs;
        obs.latent_dim = run.latent_dim;
        obs.final_total = h.back().total;
        obs.final_recon = h.back().recon;
        obs.final_kl = h.back().kl;
        const std::size_t tail = std::min<std::size_t>(10, h.size());
        double sum = 0.0;
        for (std::size_t i = h.size() - tail; i < h.size(); ++i) {
            sum += h[i].total;
        }
        obs.tail_mean_total = sum / static_cast<double>(tail);
        obs.epochs_to_settle = h.back().epoch;
        for (const auto& e : h) {
            if (e.total <= obs.tail_mean_total * 1.01) {
                obs.epochs_to_settle = e.epoch;
                break;
            }
        }
        out.push_back(obs);
    }
    return out;
}

std::string latent_dim_report(const std::vector<LatentDimObservation>& observations)
{
    std::ostringstream os;
    os << "latent_dim,final_total,final_kl,final_recon,tail_mean_total,epochs_to_settle\n";
    for (const auto& o : observations) {
        os << o.latent_dim << ',' << text::format_double(o.final_total) << ','
           << text::format_double(o.final_kl) << ',' << text::format_double(o.final_recon) << ','
           << text::format_double(o.tail_mean_total) << ',' << o.epochs_to_settle << '\n';
    }
    if (!observations.empty()) {
        auto best_by = [&](auto key) {
            return std::min_element(observations.begin(), observations.end(),
                                    [&](const auto& a, const auto& b) { return key(a) < key(b); })
                ->latent_dim;
        };
        os << "# lowest tail-mean total loss: J=" << best_by([](const auto& o) { return o.tail_mean_total; })
           << '\n';
        os << "# lowest final reconstruction loss: J="
           << best_by([](const auto& o) { return o.final_recon; }) << '\n';
        os << "# fastest to settle within 1% of final loss: J="
           << best_by([](const auto& o) { return o.epochs_to_settle; }) << '\n';
    }
    return os.str();
}

} // namespace maculavae
