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

#include <string>

#include "maculavae/clustering.hpp"
#include "maculavae/errors.hpp"
#include "maculavae/text_io.hpp"

namespace maculavae {

namespace {

std::string z_header(Eigen::Index dim)
{
    std::string out;
    for (Eigen::Index j = 1; j <= dim; ++j) {
        out += ",z" + std::to_string(j);
    }
    return out;
}

} // namespace

std::string latents_to_csv(const std::vector<LatentPoint>& latents)
{
    const Eigen::Index dim = latents.empty() ? 0 : latents.front().mu.size();
    std::string out = "id,disease" + z_header(dim) + ",cluster\n";
    for (const auto& p : latents) {
        if (p.mu.size() != dim) {
            throw ShapeError("latent points have mixed dimensions");
        }
        out += std::to_string(p.id);
        out += ',';
        out += disease_token(p.disease);
        for (Eigen::Index j = 0; j < dim; ++j) {
            out += ',' + text::format_double(p.mu[j]);
        }
        out += ',';
        if (p.cluster) {
            out += std::to_string(*p.cluster);
        }
        out += '\n';
    }
    return out;
}

std::vector<LatentPoint> latents_from_csv(std::string_view csv)
{
    const auto rows = text::lines(csv);
    if (rows.empty()) {
        throw ParseError("latents file is empty", 1);
    }
    const auto header = text::split_csv_row(rows.front());
    if (header.size() < 4 || header[0] != "id" || header[1] != "disease"
        || header.back() != "cluster") {
        throw ParseError("expected header id,disease,z1,...,zJ,cluster", 1);
    }
    const std::size_t dim = header.size() - 3;
    if (rows.front() != "id,disease" + z_header(static_cast<Eigen::Index>(dim)) + ",cluster") {
        throw ParseError("expected header id,disease,z1,...,zJ,cluster", 1);
    }

    std::vector<LatentPoint> out;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const std::size_t line = r + 1;
        if (rows[r].empty()) {
            continue;
        }
        const auto fields = text::split_csv_row(rows[r]);
        if (fields.size() != header.size()) {
            throw ParseError("expected " + std::to_string(header.size()) + " fields", line);
        }
        LatentPoint p;
        const auto id = text::parse_int(fields[0], line);
        if (id < 0) {
            throw ParseError("negative id", line);
        }
        p.id = static_cast<std::size_t>(id);
        const auto disease = disease_from_token(fields[1]);
        if (!disease) {
            throw ParseError("unknown disease '" + std::string(fields[1]) + "'", line);
        }
        p.disease = *disease;
        p.mu.resize(static_cast<Eigen::Index>(dim));
        for (std::size_t j = 0; j < dim; ++j) {
            p.mu[static_cast<Eigen::Index>(j)] = text::parse_double(fields[2 + j], line);
        }
        if (!p.mu.allFinite()) {
            throw ParseError("non-finite latent coordinate", line);
        }
        if (!fields.back().empty()) {
            const auto c = text::parse_int(fields.back(), line);
            if (c < 0) {
                throw ParseError("negative cluster index", line);
            }
            p.cluster = static_cast<int>(c);
        }
        out.push_back(std::move(p));
    }
    return out;
}

void write_latents(const std::filesystem::path& path, const std::vector<LatentPoint>& latents)
{
    text::write_file(path, latents_to_csv(latents));
}

std::vector<LatentPoint> read_latents(const std::filesystem::path& path)
{
    return latents_from_csv(text::read_file(path));
}

std::string centroids_to_csv(const Eigen::MatrixXd& centroids)
{
    std::string out = "cluster" + z_header(centroids.cols()) + "\n";
    for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
        out += std::to_string(c);
        for (Eigen::Index j = 0; j < centroids.cols(); ++j) {
            out += ',' + text::format_double(centroids(c, j));
        }
        out += '\n';
    }
    return out;
}

std::string elbow_to_csv(const std::vector<ElbowPoint>& elbow)
{
    std::string out = "k,inertia\n";
    for (const auto& e : elbow) {
        out += std::to_string(e.k) + ',' + text::format_double(e.inertia) + '\n';
    }
    return out;
}

} // namespace maculavae
