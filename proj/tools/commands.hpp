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

#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pipeline_config.hpp"

namespace maculavae::cli {

std::filesystem::path cohort_path(const PipelineConfig& config);
std::filesystem::path weights_path(const PipelineConfig& config);
std::filesystem::path latents_path(const PipelineConfig& config);
std::filesystem::path assignments_path(const PipelineConfig& config);

/// Writes the cohort CSV plus the data-model tables under <out>/data_model.
void cmd_generate(const PipelineConfig& config, std::ostream& out);

struct TrainRequest {
    bool compare_dims = false;
    std::vector<int> dims{2, 3, 4};
    int log_every = 10; // 0 silences per-epoch lines
};

/// Single run: weights JSON and loss_history.csv. Comparison run: one weights
/// file and history per latent size (suffix _J<n>) plus latent_dim_comparison.csv.
void cmd_train(const PipelineConfig& config, const TrainRequest& request, std::ostream& out,
               std::ostream& log);

/// Latents CSV of posterior means. Fails if expected_latent_dim is set and
/// disagrees with the weights file.
void cmd_infer(const PipelineConfig& config, std::optional<int> expected_latent_dim,
               std::ostream& out);

/// Assignments (latents CSV with the cluster column filled), centroids and
/// elbow data.
void cmd_cluster(const PipelineConfig& config, std::ostream& out);

enum class ReportFormat { Csv, Table };

/// Cluster report, purity statistics and scatter exports.
void cmd_report(const PipelineConfig& config, ReportFormat format, std::ostream& out,
                std::ostream& log);

/// Parses argv-style arguments (without the program name) and dispatches.
/// Returns the process exit code; errors are reported on `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace maculavae::cli
