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

// Exhaustive k=2 partition search: the optimal inertia over every labeling
// with both clusters non-empty, centroids recomputed per labeling.

#pragma once

#include <cstdint>
#include <limits>

#include <Eigen/Core>

namespace maculavae::oracle {

inline double best_two_cluster_inertia(const Eigen::MatrixXd& points)
{
    const auto n = static_cast<int>(points.rows());
    double best = std::numeric_limits<double>::infinity();
    for (std::uint32_t mask = 1; mask + 1 < (1u << n); ++mask) {
        Eigen::RowVectorXd sum[2] = {Eigen::RowVectorXd::Zero(points.cols()),
                                     Eigen::RowVectorXd::Zero(points.cols())};
        int count[2] = {0, 0};
        for (int i = 0; i < n; ++i) {
            const int c = (mask >> i) & 1u;
            sum[c] += points.row(i);
            ++count[c];
        }
        const Eigen::RowVectorXd centre[2] = {sum[0] / count[0], sum[1] / count[1]};
        double inertia = 0.0;
        for (int i = 0; i < n; ++i) {
            const int c = (mask >> i) & 1u;
            inertia += (points.row(i) - centre[c]).squaredNorm();
        }
        best = std::min(best, inertia);
    }
    return best;
}

} // namespace maculavae::oracle
