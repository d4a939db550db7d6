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

#include "maculavae/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "maculavae/errors.hpp"

namespace maculavae {

namespace {

void require_feasible(const Eigen::MatrixXd& points, int k)
{
    if (k < 1) {
        throw InfeasibleError("k must be at least 1");
    }
    if (points.rows() < k) {
        throw InfeasibleError("cannot form " + std::to_string(k) + " clusters from "
                              + std::to_string(points.rows()) + " points");
    }
    if (!points.allFinite()) {
        throw NumericError("points contain NaN or Inf");
    }
}

double squared_distance(const Eigen::MatrixXd& a, Eigen::Index row_a, const Eigen::MatrixXd& b,
                        Eigen::Index row_b)
{
    return (a.row(row_a) - b.row(row_b)).squaredNorm();
}

/// Nearest centre per point (strict < keeps the lowest index on ties).
double assign_points(const Eigen::MatrixXd& points, const Eigen::MatrixXd& centroids,
                     std::vector<int>& labels, std::vector<double>& distances)
{
    const Eigen::Index n = points.rows();
    labels.resize(static_cast<std::size_t>(n));
    distances.resize(static_cast<std::size_t>(n));
    double inertia = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        int best = 0;
        double best_d = squared_distance(points, i, centroids, 0);
        for (Eigen::Index c = 1; c < centroids.rows(); ++c) {
            const double d = squared_distance(points, i, centroids, c);
            if (d < best_d) {
                best_d = d;
                best = static_cast<int>(c);
            }
        }
        labels[static_cast<std::size_t>(i)] = best;
        distances[static_cast<std::size_t>(i)] = best_d;
        inertia += best_d;
    }
    return inertia;
}

} // namespace

std::vector<LatentPoint> infer_latents(const VaeParams& params, const Cohort& cohort,
                                       double age_cap)
{
    params.validate_shapes();
    if (!params.all_finite()) {
        throw NumericError("VAE parameters contain NaN or Inf");
    }
    const auto n = static_cast<Eigen::Index>(cohort.records.size());
    Eigen::MatrixXd inputs(kInputDim, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const FeatureVec x = encode_features(cohort.records[static_cast<std::size_t>(i)], age_cap);
        for (int d = 0; d < kInputDim; ++d) {
            inputs(d, i) = x[d];
        }
    }
    Eigen::MatrixXd mu;
    Eigen::MatrixXd log_var;
    if (n > 0) {
        encode_batch(params, inputs, mu, log_var);
    }

    std::vector<LatentPoint> out(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        auto& lp = out[static_cast<std::size_t>(i)];
        const auto& rec = cohort.records[static_cast<std::size_t>(i)];
        lp.id = rec.id;
        lp.disease = rec.disease;
        lp.mu = mu.col(i);
        lp.log_var = log_var.col(i);
    }
    return out;
}

Eigen::MatrixXd latent_matrix(const std::vector<LatentPoint>& latents)
{
    if (latents.empty()) {
        return {};
    }
    const Eigen::Index dim = latents.front().mu.size();
    Eigen::MatrixXd m(static_cast<Eigen::Index>(latents.size()), dim);
    for (std::size_t i = 0; i < latents.size(); ++i) {
        if (latents[i].mu.size() != dim) {
            throw ShapeError("latent points have mixed dimensions");
        }
        m.row(static_cast<Eigen::Index>(i)) = latents[i].mu.transpose();
    }
    return m;
}

Eigen::MatrixXd kmeans_pp_init(const Eigen::MatrixXd& points, int k, Rng& rng)
{
    require_feasible(points, k);
    const Eigen::Index n = points.rows();
    Eigen::MatrixXd centroids(k, points.cols());

    auto first = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
    centroids.row(0) = points.row(first);

    std::vector<double> nearest(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        nearest[static_cast<std::size_t>(i)] = squared_distance(points, i, centroids, 0);
    }

    for (int c = 1; c < k; ++c) {
        double total = 0.0;
        for (double d : nearest) {
            total += d;
        }
        Eigen::Index chosen = n - 1;
        if (total > 0.0) {
            const double target = rng.uniform() * total;
            double running = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                const double d = nearest[static_cast<std::size_t>(i)];
                running += d;
                if (target < running && d > 0.0) {
                    chosen = i;
                    break;
                }
            }
            // Rounding can leave target just past the last bucket.
            while (chosen > 0 && nearest[static_cast<std::size_t>(chosen)] == 0.0) {
                --chosen;
            }
        } else {
            // Every point coincides with a chosen centre.
            chosen = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
        }
        centroids.row(c) = points.row(chosen);
        for (Eigen::Index i = 0; i < n; ++i) {
            auto& d = nearest[static_cast<std::size_t>(i)];
            d = std::min(d, squared_distance(points, i, centroids, c));
        }
    }
    return centroids;
}

KmeansResult lloyd_refine(const Eigen::MatrixXd& points, Eigen::MatrixXd centroids, int max_iter,
                          double tol)
{
    const int k = static_cast<int>(centroids.rows());
    require_feasible(points, k);
    if (centroids.cols() != points.cols()) {
        throw ShapeError("centroids and points differ in dimension");
    }
    if (max_iter < 0 || !(tol >= 0.0)) {
        throw ConfigError("max_iter and tol must be non-negative");
    }

    const Eigen::Index n = points.rows();
    KmeansResult result;
    std::vector<int> labels;
    std::vector<double> distances;
    double inertia = assign_points(points, centroids, labels, distances);
    result.inertia_history.push_back(inertia);

    std::vector<int> counts(static_cast<std::size_t>(k));
    std::vector<int> next_labels;
    for (int iter = 1; iter <= max_iter; ++iter) {
        Eigen::MatrixXd updated = Eigen::MatrixXd::Zero(k, points.cols());
        std::fill(counts.begin(), counts.end(), 0);
        for (Eigen::Index i = 0; i < n; ++i) {
            const int c = labels[static_cast<std::size_t>(i)];
            updated.row(c) += points.row(i);
            ++counts[static_cast<std::size_t>(c)];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] > 0) {
                updated.row(c) /= static_cast<double>(counts[static_cast<std::size_t>(c)]);
                continue;
            }
            // Empty cluster: take over the worst-served point.
            const auto far = static_cast<Eigen::Index>(
                std::max_element(distances.begin(), distances.end()) - distances.begin());
            updated.row(c) = points.row(far);
            distances[static_cast<std::size_t>(far)] = 0.0;
        }

        double shift = 0.0;
        for (int c = 0; c < k; ++c) {
            shift = std::max(shift, std::sqrt(squared_distance(updated, c, centroids, c)));
        }
        centroids = std::move(updated);

        inertia = assign_points(points, centroids, next_labels, distances);
        result.inertia_history.push_back(inertia);
        result.iterations = iter;
        const bool changed = next_labels != labels;
        labels.swap(next_labels);
        if (!changed || shift < tol) {
            result.converged = true;
            break;
        }
    }

    result.centroids = std::move(centroids);
    result.assignments = std::move(labels);
    result.inertia = inertia;
    return result;
}

KmeansResult lloyd_kmeans(const Eigen::MatrixXd& points, int k, Rng& rng, int max_iter, double tol)
{
    return lloyd_refine(points, kmeans_pp_init(points, k, rng), max_iter, tol);
}

KmeansResult kmeans_best_of(const Eigen::MatrixXd& points, int k, std::uint64_t seed, int restarts,
                            int max_iter, double tol)
{
    if (restarts < 1) {
        throw ConfigError("restarts must be at least 1");
    }
    Rng rng(seed);
    KmeansResult best = lloyd_kmeans(points, k, rng, max_iter, tol);
    for (int r = 1; r < restarts; ++r) {
        KmeansResult candidate = lloyd_kmeans(points, k, rng, max_iter, tol);
        if (candidate.inertia < best.inertia) {
            best = std::move(candidate);
        }
    }
    return best;
}

std::vector<ElbowPoint> elbow_curve(const Eigen::MatrixXd& points, int k_max, std::uint64_t seed,
                                    int restarts, int max_iter, double tol)
{
    std::vector<ElbowPoint> out;
    const int limit = std::min<int>(k_max, static_cast<int>(points.rows()));
    for (int k = 1; k <= limit; ++k) {
        out.push_back({k, kmeans_best_of(points, k, seed, restarts, max_iter, tol).inertia});
    }
    return out;
}

void assign_clusters(std::vector<LatentPoint>& latents, const KmeansResult& result)
{
    if (result.assignments.size() != latents.size()) {
        throw ShapeError("assignment count does not match latent count");
    }
    for (std::size_t i = 0; i < latents.size(); ++i) {
        latents[i].cluster = result.assignments[i];
    }
}

} // namespace maculavae
