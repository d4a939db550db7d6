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
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "maculavae/datagen.hpp"

namespace maculavae {

inline constexpr int kInputDim = static_cast<int>(kFeatureDim);
inline constexpr int kDefaultHiddenDim = 512;

/// Bounds applied to the encoder's log-variance output.
inline constexpr double kLogVarMin = -20.0;
inline constexpr double kLogVarMax = 20.0;

/// Decoder probabilities are clamped to [kProbClamp, 1 - kProbClamp] before logs.
inline constexpr double kProbClamp = 1e-7;

struct LayerParams {
    Eigen::MatrixXd weights; // out_dim x in_dim
    Eigen::VectorXd bias;    // out_dim
};

/// Weights of the four dense layers:
///
///   x(6) -> relu(enc_hidden) -> enc_head -> [mu(J); log_var(J)]
///   z(J) -> relu(dec_hidden) -> sigmoid(dec_out) -> xhat(6)
///
/// Gradients share this layout (see VaeGradients).
struct VaeParams {
    LayerParams enc_hidden; // hidden x 6
    LayerParams enc_head;   // 2J x hidden; first J rows give mu, last J give log_var
    LayerParams dec_hidden; // hidden x J
    LayerParams dec_out;    // 6 x hidden
    int latent_dim = 0;
    int hidden_dim = 0;

    /// Correctly shaped parameters with every entry zero.
    static VaeParams zeros(int latent_dim, int hidden_dim = kDefaultHiddenDim);

    /// Throws ShapeError when layer shapes disagree with the dims.
    void validate_shapes() const;
    bool all_finite() const;
    Eigen::Index parameter_count() const;
};

using VaeGradients = VaeParams;

/// Applies fn(tensor_a, tensor_b) to each of the eight weight/bias pairs of two
/// identically shaped parameter sets, in a fixed order.
template <class A, class B, class Fn>
void for_each_tensor_pair(A& a, B& b, Fn&& fn)
{
    fn(a.enc_hidden.weights, b.enc_hidden.weights);
    fn(a.enc_hidden.bias, b.enc_hidden.bias);
    fn(a.enc_head.weights, b.enc_head.weights);
    fn(a.enc_head.bias, b.enc_head.bias);
    fn(a.dec_hidden.weights, b.dec_hidden.weights);
    fn(a.dec_hidden.bias, b.dec_hidden.bias);
    fn(a.dec_out.weights, b.dec_out.weights);
    fn(a.dec_out.bias, b.dec_out.bias);
}

/// Flattens every parameter (layer by layer, weights row-major, then bias).
Eigen::VectorXd flatten(const VaeParams& params);

/// Inverse of flatten; `params` supplies the shapes.
void unflatten(const Eigen::VectorXd& flat, VaeParams& params);

/// Gaussian approximate posterior q(z|x) = N(mu, diag(exp(log_var))).
struct PosteriorParams {
    Eigen::VectorXd mu;
    Eigen::VectorXd log_var;
};

/// Minimization convention: total = kl + recon = -ELBO.
struct LossBreakdown {
    double total = 0.0;
    double kl = 0.0;
    double recon = 0.0;
};

Eigen::VectorXd to_vector(const FeatureVec& x);

PosteriorParams encode(const VaeParams& params, const FeatureVec& x);

/// z = mu + exp(log_var / 2) * eps. eps is supplied by the caller.
Eigen::VectorXd reparameterize(const PosteriorParams& post, const Eigen::VectorXd& eps);

Eigen::VectorXd decode(const VaeParams& params, const Eigen::VectorXd& z);

/// Closed-form KL(q || N(0, I)) = -1/2 sum(1 + log_var - mu^2 - exp(log_var)).
double kl_term(const PosteriorParams& post);

/// Bernoulli negative log-likelihood summed over the six features.
double recon_term(const FeatureVec& x, const Eigen::VectorXd& xhat);

/// Single-sample estimate of the negative ELBO for one record.
LossBreakdown loss(const VaeParams& params, const FeatureVec& x, const Eigen::VectorXd& eps);

/// ReconstructionOnly drops the KL contribution from the gradient. Used to
/// separate the two paths into the encoder.
enum class LossTerms { Full, ReconstructionOnly };

/// Reverse-mode gradient of loss() with respect to every parameter.
VaeGradients loss_gradients(const VaeParams& params, const FeatureVec& x,
                            const Eigen::VectorXd& eps, LossTerms terms = LossTerms::Full);

struct BatchLoss {
    LossBreakdown mean;  // averaged over the batch
    VaeGradients grads;  // gradient of mean.total
};

/// Scratch matrices for batch_loss_and_gradients, reused across calls.
struct BatchWorkspace {
    Eigen::MatrixXd a1, h1, head, log_var, z, a3, h3, a4, xhat;
    Eigen::MatrixXd g4, g3, gz, g_head, g1;
    Eigen::ArrayXXd sd;
};

/// Batched loss and gradient. Column b of `inputs` (6 x B) is one record and
/// column b of `eps` (J x B) its noise draw. The reduction over the batch is
/// a fixed-order sum, so results are reproducible bit for bit.
BatchLoss batch_loss_and_gradients(const VaeParams& params, const Eigen::MatrixXd& inputs,
                                   const Eigen::MatrixXd& eps,
                                   LossTerms terms = LossTerms::Full);

/// Same as above, writing into \`out\` and reusing \`ws\` between calls.
void batch_loss_and_gradients(const VaeParams& params, const Eigen::MatrixXd& inputs,
                              const Eigen::MatrixXd& eps, LossTerms terms, BatchWorkspace& ws,
                              BatchLoss& out);

/// Posterior means and log-variances for a batch (columns are records).
void encode_batch(const VaeParams& params, const Eigen::MatrixXd& inputs, Eigen::MatrixXd& mu,
                  Eigen::MatrixXd& log_var);

// Weights file: JSON with a dims header and each layer's weights as row-major
// nested arrays. Doubles round-trip exactly.
std::string weights_to_json(const VaeParams& params);
VaeParams weights_from_json(std::string_view json);
void save_weights(const std::filesystem::path& path, const VaeParams& params);
VaeParams load_weights(const std::filesystem::path& path);

} // namespace maculavae
