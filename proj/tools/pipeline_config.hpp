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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>

#include "maculavae/datagen.hpp"
#include "maculavae/trainer.hpp"

namespace maculavae::cli {

struct DataConfig {
    DiseaseModels models = default_disease_models();
    std::size_t per_disease_count = 1000;
    std::uint64_t seed = 42;
    double age_cap = kDefaultAgeCap;
};

struct ClusterConfig {
    int k = 14;
    std::uint64_t seed = 42;
    double tol = 1e-6;
    int max_iter = 300;
    int restarts = 10;
    int elbow_max_k = 20;
};

/// Optional file locations; unset entries default to files under `out`.
struct PathConfig {
    std::filesystem::path out = "out";
    std::optional<std::filesystem::path> cohort;
    std::optional<std::filesystem::path> weights;
    std::optional<std::filesystem::path> latents;
    std::optional<std::filesystem::path> assignments;
};

struct PipelineConfig {
    DataConfig data;
    TrainConfig train;
    ClusterConfig cluster;
    PathConfig paths;

    /// Throws ConfigError naming the offending field.
    void validate() const;
};

inline PipelineConfig default_pipeline_config()
{
    PipelineConfig config;
    config.train.seed = 42;
    return config;
}

/// Overlays a JSON document on the defaults. Unknown keys are rejected.
PipelineConfig parse_pipeline_config(std::string_view json_text);
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

} // namespace maculavae::cli
