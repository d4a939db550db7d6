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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "maculavae/datagen.hpp"
#include "maculavae/vae.hpp"

namespace maculavae {

struct TrainConfig {
    int epochs = 1000;
    int batch_size = 100;
    double learning_rate = 1e-3;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    std::uint64_t seed = 0;
    int latent_dim = 3;
    int hidden_dim = kDefaultHiddenDim;
    bool shuffle_each_epoch = true;
    double age_cap = kDefaultAgeCap;

    /// Throws ConfigError. cohort_size = 0 skips the batch-size upper bound.
    void validate(std::size_t cohort_size = 0) const;
};

struct EpochLoss {
    int epoch = 0; // 1-based
    double total = 0.0;
    double kl = 0.0;
    double recon = 0.0;
};

using LossHistory = std::vector<EpochLoss>;

inline constexpr std::string_view kLossHistoryCsvHeader = "epoch,total,kl,recon";
std::string loss_history_to_csv(const LossHistory& history);

/// Glorot-uniform weights, a = sqrt(6 / (fan_in + fan_out)); zero biases.
VaeParams init_params(int latent_dim, int hidden_dim, std::uint64_t seed);

struct AdamState {
    VaeParams first_moment;
    VaeParams second_moment;

    static AdamState zeros_like(const VaeParams& params);
};

/// One bias-corrected Adam update, in place. step_index starts at 1.
void adam_step(VaeParams& params, const VaeGradients& grads, AdamState& state,
               const TrainConfig& config, long step_index);

/// In-place Fisher-Yates permutation used for the per-epoch batch order.
void shuffle_order(std::vector<std::size_t>& order, Rng& rng);

struct TrainResult {
    VaeParams params;
    LossHistory history;
};

/// Called after each epoch; used by the CLI to print progress.
using EpochCallback = std::function<void(const EpochLoss&)>;

/// Minibatch Adam over the whole cohort. Fresh noise per sample per step;
/// deterministic given (cohort, config). Epoch losses are the sample-weighted
/// means of the per-batch losses seen during that epoch.
TrainResult train(const Cohort& cohort, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});

struct LatentDimRun {
    int latent_dim = 0;
    TrainResult result;
};

/// Trains one model per latent dimension with otherwise identical config.
std::vector<LatentDimRun> compare_latent_dims(const Cohort& cohort, const TrainConfig& base,
                                              const std::vector<int>& dims,
                                              const EpochCallback& on_epoch = {});

/// Summary numbers for judging which latent size trained "best".
struct LatentDimObservation {
    int latent_dim = 0;
    double final_total = 0.0;
    double final_recon = 0.0;
    double final_kl = 0.0;
    /// Mean total loss over the last min(10, epochs) epochs.
    double tail_mean_total = 0.0;
    /// First epoch whose total is within 1% of the final tail mean.
    int epochs_to_settle = 0;
};

std::vector<LatentDimObservation> observe_latent_dims(const std::vector<LatentDimRun>& runs);

/// Plain-text comparison naming the best dimension under each criterion.
std::string latent_dim_report(const std::vector<LatentDimObservation>& observations);

} // namespace maculavae
