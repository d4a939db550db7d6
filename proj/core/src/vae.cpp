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

#include "maculavae/vae.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "maculavae/errors.hpp"

namespace maculavae {

namespace {

LayerParams zero_layer(int out_dim, int in_dim)
{
    return {Eigen::MatrixXd::Zero(out_dim, in_dim), Eigen::VectorXd::Zero(out_dim)};
}

void check_layer(const LayerParams& layer, Eigen::Index rows, Eigen::Index cols, const char* name)
{
    if (layer.weights.rows() != rows || layer.weights.cols() != cols || layer.bias.size() != rows) {
        throw ShapeError(std::string(name) + ": expected " + std::to_string(rows) + "x"
                         + std::to_string(cols) + " weights, got "
                         + std::to_string(layer.weights.rows()) + "x"
                         + std::to_string(layer.weights.cols()) + " with bias of "
                         + std::to_string(layer.bias.size()));
    }
}

double sigmoid(double a)
{
    if (a >= 0.0) {
        return 1.0 / (1.0 + std::exp(-a));
    }
    const double e = std::exp(a);
    return e / (1.0 + e);
}

double clamp_log_var(double v)
{
    return std::clamp(v, kLogVarMin, kLogVarMax);
}

// Per-dimension KL written as 1/2 (mu^2 + (e^v - 1 - v)); the bracket is
// non-negative and expm1 keeps it accurate near v = 0.
double kl_dim(double mu, double log_var)
{
    return 0.5 * (mu * mu + (std::expm1(log_var) - log_var));
}

double bernoulli_nll(double x, double xhat)
{
    const double p = std::clamp(xhat, kProbClamp, 1.0 - kProbClamp);
    return -(x * std::log(p) + (1.0 - x) * std::log1p(-p));
}

void require_finite_params(const VaeParams& params)
{
    if (!params.all_finite()) {
        throw NumericError("VAE parameters contain NaN or Inf");
    }
}

template <class Derived>
void append_row_major(const Eigen::MatrixBase<Derived>& m, Eigen::VectorXd& flat, Eigen::Index& pos)
{
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            flat[pos++] = m(r, c);
        }
    }
}

template <class Derived>
void read_row_major(const Eigen::VectorXd& flat, Eigen::Index& pos, Eigen::MatrixBase<Derived>& m)
{
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            m(r, c) = flat[pos++];
        }
    }
}

} // namespace

VaeParams VaeParams::zeros(int latent_dim, int hidden_dim)
{
    if (latent_dim < 1 || hidden_dim < 1) {
        throw ShapeError("latent_dim and hidden_dim must be at least 1");
    }
    VaeParams p;
    p.latent_dim = latent_dim;
    p.hidden_dim = hidden_dim;
    p.enc_hidden = zero_layer(hidden_dim, kInputDim);
    p.enc_head = zero_layer(2 * latent_dim, hidden_dim);
    p.dec_hidden = zero_layer(hidden_dim, latent_dim);
    p.dec_out = zero_layer(kInputDim, hidden_dim);
    return p;
}

void VaeParams::validate_shapes() const
{
    if (latent_dim < 1 || hidden_dim < 1) {
        throw ShapeError("latent_dim and hidden_dim must be at least 1");
    }
    check_layer(enc_hidden, hidden_dim, kInputDim, "enc_hidden");
    check_layer(enc_head, 2 * latent_dim, hidden_dim, "enc_head");
    check_layer(dec_hidden, hidden_dim, latent_dim, "dec_hidden");
    check_layer(dec_out, kInputDim, hidden_dim, "dec_out");
}

bool VaeParams::all_finite() const
{
    return enc_hidden.weights.allFinite() && enc_hidden.bias.allFinite()
           && enc_head.weights.allFinite() && enc_head.bias.allFinite()
           && dec_hidden.weights.allFinite() && dec_hidden.bias.allFinite()
           && dec_out.weights.allFinite() && dec_out.bias.allFinite();
}

Eigen::Index VaeParams::parameter_count() const
{
    Eigen::Index n = 0;
    for_each_tensor_pair(*this, *this, [&n](const auto& t, const auto&) { n += t.size(); });
    return n;
}

Eigen::VectorXd flatten(const VaeParams& params)
{
    Eigen::VectorXd flat(params.parameter_count());
    Eigen::Index pos = 0;
    for_each_tensor_pair(params, params,
                         [&](const auto& t, const auto&) { append_row_major(t, flat, pos); });
    return flat;
}

void unflatten(const Eigen::VectorXd& flat, VaeParams& params)
{
    if (flat.size() != params.parameter_count()) {
        throw ShapeError("flat parameter vector has the wrong length");
    }
    Eigen::Index pos = 0;
    for_each_tensor_pair(params, params, [&](auto& t, auto&) { read_row_major(flat, pos, t); });
}

Eigen::VectorXd to_vector(const FeatureVec& x)
{
    return Eigen::Map<const Eigen::VectorXd>(x.data(), kInputDim);
}

PosteriorParams encode(const VaeParams& params, const FeatureVec& x)
{
    params.validate_shapes();
    require_finite_params(params);

    const Eigen::VectorXd h =
        (params.enc_hidden.weights * to_vector(x) + params.enc_hidden.bias).cwiseMax(0.0);
    const Eigen::VectorXd head = params.enc_head.weights * h + params.enc_head.bias;

    const int j = params.latent_dim;
    PosteriorParams post;
    post.mu = head.head(j);
    post.log_var = head.tail(j).unaryExpr(&clamp_log_var);
    return post;
}

Eigen::VectorXd reparameterize(const PosteriorParams& post, const Eigen::VectorXd& eps)
{
    if (eps.size() != post.mu.size() || post.log_var.size() != post.mu.size()) {
        throw ShapeError("reparameterize: eps, mu and log_var must have equal length");
    }
    return post.mu.array() + (0.5 * post.log_var.array()).exp() * eps.array();
}

Eigen::VectorXd decode(const VaeParams& params, const Eigen::VectorXd& z)
{
    params.validate_shapes();
    require_finite_params(params);
    if (z.size() != params.latent_dim) {
        throw ShapeError("decode: z has the wrong dimension");
    }
    if (!z.allFinite()) {
        throw NumericError("decode: latent vector contains NaN or Inf");
    }
    const Eigen::VectorXd h =
        (params.dec_hidden.weights * z + params.dec_hidden.bias).cwiseMax(0.0);
    const Eigen::VectorXd logits = params.dec_out.weights * h + params.dec_out.bias;
    return logits.unaryExpr(&sigmoid);
}

double kl_term(const PosteriorParams& post)
{
    double kl = 0.0;
    for (Eigen::Index j = 0; j < post.mu.size(); ++j) {
        kl += kl_dim(post.mu[j], post.log_var[j]);
    }
    return kl;
}

double recon_term(const FeatureVec& x, const Eigen::VectorXd& xhat)
{
    if (xhat.size() != kInputDim) {
        throw ShapeError("recon_term: xhat must have 6 components");
    }
    double nll = 0.0;
    for (int d = 0; d < kInputDim; ++d) {
        nll += bernoulli_nll(x[d], xhat[d]);
    }
    return nll;
}

LossBreakdown loss(const VaeParams& params, const FeatureVec& x, const Eigen::VectorXd& eps)
{
    const PosteriorParams post = encode(params, x);
    const Eigen::VectorXd xhat = decode(params, reparameterize(post, eps));
    LossBreakdown out;
    out.kl = kl_term(post);
    out.recon = recon_term(x, xhat);
    out.total = out.kl + out.recon;
    if (!std::isfinite(out.total)) {
        throw NumericError("loss is not finite");
    }
    return out;
}

VaeGradients loss_gradients(const VaeParams& params, const FeatureVec& x,
                            const Eigen::VectorXd& eps, LossTerms terms)
{
    params.validate_shapes();
    require_finite_params(params);
    if (eps.size() != params.latent_dim) {
        throw ShapeError("loss_gradients: eps has the wrong dimension");
    }
    return batch_loss_and_gradients(params, to_vector(x), eps, terms).grads;
}

void encode_batch(const VaeParams& params, const Eigen::MatrixXd& inputs, Eigen::MatrixXd& mu,
                  Eigen::MatrixXd& log_var)
{
    params.validate_shapes();
    if (inputs.rows() != kInputDim) {
        throw ShapeError("encode_batch: inputs must have 6 rows");
    }
    const Eigen::MatrixXd h =
        ((params.enc_hidden.weights * inputs).colwise() + params.enc_hidden.bias).cwiseMax(0.0);
    const Eigen::MatrixXd head = (params.enc_head.weights * h).colwise() + params.enc_head.bias;
    const int j = params.latent_dim;
    mu = head.topRows(j);
    log_var = head.bottomRows(j).unaryExpr(&clamp_log_var);
}

BatchLoss batch_loss_and_gradients(const VaeParams& params, const Eigen::MatrixXd& inputs,
                                   const Eigen::MatrixXd& eps, LossTerms terms)
{
    BatchWorkspace ws;
    BatchLoss out;
    batch_loss_and_gradients(params, inputs, eps, terms, ws, out);
    return out;
}

void batch_loss_and_gradients(const VaeParams& params, const Eigen::MatrixXd& inputs,
                              const Eigen::MatrixXd& eps, LossTerms terms, BatchWorkspace& ws,
                              BatchLoss& out)
{
    const int j = params.latent_dim;
    const Eigen::Index batch = inputs.cols();
    if (inputs.rows() != kInputDim || eps.rows() != j || eps.cols() != batch || batch == 0) {
        throw ShapeError("batch_loss_and_gradients: inputs must be 6xB and eps JxB with B > 0");
    }
    const double scale = 1.0 / static_cast<double>(batch);
    const bool with_kl = terms == LossTerms::Full;

    // Forward.
    ws.a1.noalias() = params.enc_hidden.weights * inputs;
    ws.a1.colwise() += params.enc_hidden.bias;
    ws.h1 = ws.a1.cwiseMax(0.0);
    ws.head.noalias() = params.enc_head.weights * ws.h1;
    ws.head.colwise() += params.enc_head.bias;
    const auto mu = ws.head.topRows(j);
    const auto raw_log_var = ws.head.bottomRows(j);
    ws.log_var = raw_log_var.unaryExpr(&clamp_log_var);
    ws.sd = (0.5 * ws.log_var.array()).exp();
    ws.z = (mu.array() + ws.sd * eps.array()).matrix();
    ws.a3.noalias() = params.dec_hidden.weights * ws.z;
    ws.a3.colwise() += params.dec_hidden.bias;
    ws.h3 = ws.a3.cwiseMax(0.0);
    ws.a4.noalias() = params.dec_out.weights * ws.h3;
    ws.a4.colwise() += params.dec_out.bias;
    ws.xhat = ws.a4.unaryExpr(&sigmoid);

    double kl_sum = 0.0;
    double recon_sum = 0.0;
    for (Eigen::Index b = 0; b < batch; ++b) {
        double kl = 0.0;
        for (int k = 0; k < j; ++k) {
            kl += kl_dim(mu(k, b), ws.log_var(k, b));
        }
        double recon = 0.0;
        for (int d = 0; d < kInputDim; ++d) {
            recon += bernoulli_nll(inputs(d, b), ws.xhat(d, b));
        }
        kl_sum += kl;
        recon_sum += recon;
    }
    out.mean.kl = kl_sum * scale;
    out.mean.recon = recon_sum * scale;
    out.mean.total = out.mean.kl + out.mean.recon;
    if (!std::isfinite(out.mean.total)) {
        throw NumericError("batch loss is not finite");
    }

    // Backward. With a sigmoid output and Bernoulli likelihood the logit
    // gradient is xhat - x, except where the probability clamp is active.
    ws.g4.resize(kInputDim, batch);
    for (Eigen::Index b = 0; b < batch; ++b) {
        for (int d = 0; d < kInputDim; ++d) {
            const double p = ws.xhat(d, b);
            const bool clamped = p < kProbClamp || p > 1.0 - kProbClamp;
            ws.g4(d, b) = clamped ? 0.0 : (p - inputs(d, b)) * scale;
        }
    }

    VaeGradients& g = out.grads;
    g.latent_dim = params.latent_dim;
    g.hidden_dim = params.hidden_dim;

    g.dec_out.weights.noalias() = ws.g4 * ws.h3.transpose();
    g.dec_out.bias = ws.g4.rowwise().sum();

    ws.g3.noalias() = params.dec_out.weights.transpose() * ws.g4;
    ws.g3.array() *= (ws.a3.array() > 0.0).cast<double>();
    g.dec_hidden.weights.noalias() = ws.g3 * ws.z.transpose();
    g.dec_hidden.bias = ws.g3.rowwise().sum();

    ws.gz.noalias() = params.dec_hidden.weights.transpose() * ws.g3;

    ws.g_head.resize(2 * j, batch);
    ws.g_head.topRows(j) = ws.gz;
    ws.g_head.bottomRows(j) = (ws.gz.array() * 0.5 * ws.sd * eps.array()).matrix();
    if (with_kl) {
        ws.g_head.topRows(j) += mu * scale;
        ws.g_head.bottomRows(j).array() += 0.5 * (ws.log_var.array().exp() - 1.0) * scale;
    }
    // No gradient flows through an active log-variance clamp.
    ws.g_head.bottomRows(j).array() *=
        ((raw_log_var.array() >= kLogVarMin) && (raw_log_var.array() <= kLogVarMax))
            .cast<double>();

    g.enc_head.weights.noalias() = ws.g_head * ws.h1.transpose();
    g.enc_head.bias = ws.g_head.rowwise().sum();

    ws.g1.noalias() = params.enc_head.weights.transpose() * ws.g_head;
    ws.g1.array() *= (ws.a1.array() > 0.0).cast<double>();
    g.enc_hidden.weights.noalias() = ws.g1 * inputs.transpose();
    g.enc_hidden.bias = ws.g1.rowwise().sum();
}

} // namespace maculavae
