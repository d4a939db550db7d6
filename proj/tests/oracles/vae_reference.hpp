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

// Straight-loop re-implementation of the VAE forward pass and loss, used as
// an independent oracle. Shares no code with the library besides the
// parameter container.

#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "maculavae/vae.hpp"

namespace maculavae::oracle {

inline std::vector<double> dense(const LayerParams& layer, const std::vector<double>& in)
{
    std::vector<double> out(static_cast<std::size_t>(layer.weights.rows()));
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
        double acc = layer.bias[r];
        for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) {
            acc += layer.weights(r, c) * in[static_cast<std::size_t>(c)];
        }
        out[static_cast<std::size_t>(r)] = acc;
    }
    return out;
}

inline std::vector<double> relu(std::vector<double> v)
{
    for (auto& x : v) {
        x = x > 0.0 ? x : 0.0;
    }
    return v;
}

struct RefPosterior {
    std::vector<double> mu;
    std::vector<double> log_var;
};

inline RefPosterior ref_encode(const VaeParams& p, const std::vector<double>& x)
{
    const auto h = relu(dense(p.enc_hidden, x));
    const auto head = dense(p.enc_head, h);
    RefPosterior post;
    for (int j = 0; j < p.latent_dim; ++j) {
        post.mu.push_back(head[static_cast<std::size_t>(j)]);
        double lv = head[static_cast<std::size_t>(p.latent_dim + j)];
        lv = lv < -20.0 ? -20.0 : (lv > 20.0 ? 20.0 : lv);
        post.log_var.push_back(lv);
    }
    return post;
}

inline std::vector<double> ref_decode(const VaeParams& p, const std::vector<double>& z)
{
    const auto h = relu(dense(p.dec_hidden, z));
    auto logits = dense(p.dec_out, h);
    for (auto& a : logits) {
        a = 1.0 / (1.0 + std::exp(-a));
    }
    return logits;
}

inline double ref_kl(const RefPosterior& post)
{
    double s = 0.0;
    for (std::size_t j = 0; j < post.mu.size(); ++j) {
        const double var = std::exp(post.log_var[j]);
        s += 1.0 + post.log_var[j] - post.mu[j] * post.mu[j] - var;
    }
    return -0.5 * s;
}

inline double ref_recon(const std::vector<double>& x, const std::vector<double>& xhat)
{
    double s = 0.0;
    for (std::size_t d = 0; d < x.size(); ++d) {
        const double p = std::min(std::max(xhat[d], 1e-7), 1.0 - 1e-7);
        s += x[d] * std::log(p) + (1.0 - x[d]) * std::log(1.0 - p);
    }
    return -s;
}

struct RefLoss {
    double kl;
    double recon;
    double total;
};

inline RefLoss ref_loss(const VaeParams& p, const std::vector<double>& x,
                        const std::vector<double>& eps)
{
    const auto post = ref_encode(p, x);
    std::vector<double> z(post.mu.size());
    for (std::size_t j = 0; j < z.size(); ++j) {
        z[j] = post.mu[j] + std::sqrt(std::exp(post.log_var[j])) * eps[j];
    }
    const auto xhat = ref_decode(p, z);
    RefLoss out;
    out.kl = ref_kl(post);
    out.recon = ref_recon(x, xhat);
    out.total = out.kl + out.recon;
    return out;
}

/// Pre-activations of both hidden layers, for screening finite-difference
/// coordinates that sit near a ReLU kink.
inline double min_abs_preactivation(const VaeParams& p, const std::vector<double>& x,
                                    const std::vector<double>& eps)
{
    const auto a1 = dense(p.enc_hidden, x);
    const auto h = relu(a1);
    const auto head = dense(p.enc_head, h);
    std::vector<double> z(static_cast<std::size_t>(p.latent_dim));
    for (int j = 0; j < p.latent_dim; ++j) {
        const double lv = head[static_cast<std::size_t>(p.latent_dim + j)];
        z[static_cast<std::size_t>(j)] = head[static_cast<std::size_t>(j)] + std::exp(0.5 * lv) * eps[static_cast<std::size_t>(j)];
    }
    const auto a3 = dense(p.dec_hidden, z);
    double m = 1e300;
    for (double v : a1) {
        m = std::min(m, std::abs(v));
    }
    for (double v : a3) {
        m = std::min(m, std::abs(v));
    }
    return m;
}

} // namespace maculavae::oracle
