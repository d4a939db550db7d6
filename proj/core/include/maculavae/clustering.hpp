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
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "maculavae/datagen.hpp"
#include "maculavae/random.hpp"
#include "maculavae/vae.hpp"

namespace maculavae {

struct LatentPoint {
    std::size_t id = 0;
    Disease disease = Disease::ExudativeArmd;
    Eigen::VectorXd mu;
    Eigen::VectorXd log_var; // empty when read back from a latents CSV
    std::optional<int> cluster;
};

/// Posterior mean of every record; no sampling.
std::vector<LatentPoint> infer_latents(const VaeParams& params, const Cohort& cohort,
                                       double age_cap = kDefaultAgeCap);

/// Stacks the latent means into an N x J matrix (one row per point).
Eigen::MatrixXd latent_matrix(const std::vector<LatentPoint>& latents);

struct KmeansResult {
    Eigen::MatrixXd centroids; // k x J
    std::vector<int> assignments;
    double inertia = 0.0;
    int iterations = 0;
    bool converged = false;
    /// Inertia after every assignment step, starting with the initial one.
    std::vector<double> inertia_history;
};

/// k-means++ seeding: first centre uniform, later centres drawn with
/// probability proportional to squared distance from the nearest chosen one.
Eigen::MatrixXd kmeans_pp_init(const Eigen::MatrixXd& points, int k, Rng& rng);

inline constexpr int kDefaultMaxIter = 300;
inline constexpr double kDefaultTol = 1e-6;

/// Lloyd iterations from given centres. Stops when assignments stop changing,
/// when no centre moves by tol or more, or after max_iter updates. The
/// returned assignments are always nearest-centre (ties to the lower index)
/// with respect to the returned centroids. A centre left without points is
/// moved onto the point farthest from its current centre.
KmeansResult lloyd_refine(const Eigen::MatrixXd& points, Eigen::MatrixXd centroids,
                          int max_iter = kDefaultMaxIter, double tol = kDefaultTol);

/// k-means++ seeding followed by lloyd_refine.
KmeansResult lloyd_kmeans(const Eigen::MatrixXd& points, int k, Rng& rng,
                          int max_iter = kDefaultMaxIter, double tol = kDefaultTol);

/// Lowest-inertia result of `restarts` runs drawn from one seeded stream.
KmeansResult kmeans_best_of(const Eigen::MatrixXd& points, int k, std::uint64_t seed,
                            int restarts, int max_iter = kDefaultMaxIter,
                            double tol = kDefaultTol);

struct ElbowPoint {
    int k = 0;
    double inertia = 0.0;
};

/// Best-of-restarts inertia for k = 1..k_max (capped at the number of points).
std::vector<ElbowPoint> elbow_curve(const Eigen::MatrixXd& points, int k_max, std::uint64_t seed,
                                    int restarts, int max_iter = kDefaultMaxIter,
                                    double tol = kDefaultTol);

/// Copies assignments into the latent points.
void assign_clusters(std::vector<LatentPoint>& latents, const KmeansResult& result);

/// Header: id,disease,z1,...,zJ,cluster. Unassigned points leave cluster empty.
std::string latents_to_csv(const std::vector<LatentPoint>& latents);
std::vector<LatentPoint> latents_from_csv(std::string_view csv);
void write_latents(const std::filesystem::path& path, const std::vector<LatentPoint>& latents);
std::vector<LatentPoint> read_latents(const std::filesystem::path& path);

/// Header: cluster,z1,...,zJ.
std::string centroids_to_csv(const Eigen::MatrixXd& centroids);

std::string elbow_to_csv(const std::vector<ElbowPoint>& elbow);

} // namespace maculavae
