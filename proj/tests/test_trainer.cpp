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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "maculavae/errors.hpp"
#include "maculavae/trainer.hpp"

namespace maculavae {
namespace {

Cohort small_cohort(std::size_t per_disease, std::uint64_t seed = 3)
{
    return generate_cohort(default_disease_models(), per_disease, seed);
}

TrainConfig quick_config(int epochs, int batch = 10)
{
    TrainConfig c;
    c.epochs = epochs;
    c.batch_size = batch;
    c.hidden_dim = 32;
    c.seed = 5;
    return c;
}

TEST(InitParams, Deterministic)
{
    EXPECT_EQ(flatten(init_params(3, 512, 9)), flatten(init_params(3, 512, 9)));
    EXPECT_NE(flatten(init_params(3, 512, 9)), flatten(init_params(3, 512, 10)));
}

TEST(InitParams, GlorotBoundAndZeroBias)
{
    const auto p = init_params(3, 512, 1);
    const double a = std::sqrt(6.0 / 518.0);
    EXPECT_NEAR(a, 0.10762440050012628, 1e-15);
    EXPECT_LT(p.enc_hidden.weights.cwiseAbs().maxCoeff(), a);
    EXPECT_TRUE(p.enc_hidden.bias.isZero(0.0));
    EXPECT_TRUE(p.enc_head.bias.isZero(0.0));
    EXPECT_TRUE(p.dec_hidden.bias.isZero(0.0));
    EXPECT_TRUE(p.dec_out.bias.isZero(0.0));
    EXPECT_LT(p.enc_head.weights.cwiseAbs().maxCoeff(), std::sqrt(6.0 / (512.0 + 6.0)));
    EXPECT_LT(p.dec_hidden.weights.cwiseAbs().maxCoeff(), std::sqrt(6.0 / (3.0 + 512.0)));
}

TEST(InitParams, LayerMeansWithinMonteCarloBound)
{
    const auto p = init_params(3, 512, 2);
    auto check = [](const Eigen::MatrixXd& w) {
        const double a = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
        const double n = static_cast<double>(w.size());
        EXPECT_LT(std::abs(w.mean()), 3.0 * a / std::sqrt(n));
    };
    check(p.enc_hidden.weights);
    check(p.enc_head.weights);
    check(p.dec_hidden.weights);
    check(p.dec_out.weights);
}

TEST(Adam, ZeroGradientLeavesParams)
{
    auto params = init_params(2, 8, 1);
    const auto before = flatten(params);
    auto state = AdamState::zeros_like(params);
    state.first_moment.dec_out.bias.setConstant(1.0);
    state.second_moment.dec_out.bias.setConstant(1.0);
    const auto grads = VaeParams::zeros(2, 8);
    TrainConfig config;
    adam_step(params, grads, state, config, 5);
    // Nonzero decaying moments still move parameters; the untouched ones stay.
    EXPECT_EQ(params.enc_hidden.weights, init_params(2, 8, 1).enc_hidden.weights);
    EXPECT_DOUBLE_EQ(state.first_moment.dec_out.bias[0], 0.9);
    EXPECT_DOUBLE_EQ(state.second_moment.dec_out.bias[0], 0.999);

    auto fresh = init_params(2, 8, 1);
    auto clean = AdamState::zeros_like(fresh);
    adam_step(fresh, grads, clean, config, 1);
    EXPECT_EQ(flatten(fresh), before);
}

TEST(Adam, FirstStepHandComputed)
{
    auto params = VaeParams::zeros(1, 2);
    auto grads = VaeParams::zeros(1, 2);
    unflatten(Eigen::VectorXd::Constant(params.parameter_count(), 0.5), grads);
    auto state = AdamState::zeros_like(params);
    adam_step(params, grads, state, TrainConfig{}, 1);
    // m_hat = 0.5, v_hat = 0.25, delta = -1e-3 * 0.5 / (0.5 + 1e-8).
    const auto flat = flatten(params);
    for (Eigen::Index i = 0; i < flat.size(); ++i) {
        EXPECT_NEAR(flat[i], -9.9999998e-4, 1e-12);
    }
}

TEST(Adam, ConstantGradientUnitStep)
{
    auto params = VaeParams::zeros(1, 2);
    auto grads = VaeParams::zeros(1, 2);
    unflatten(Eigen::VectorXd::Constant(params.parameter_count(), -3.0), grads);
    auto state = AdamState::zeros_like(params);
    const TrainConfig config;
    Eigen::VectorXd previous = flatten(params);
    double last_step = 0.0;
    for (long t = 1; t <= 1000; ++t) {
        adam_step(params, grads, state, config, t);
        const Eigen::VectorXd now = flatten(params);
        last_step = (now - previous).cwiseAbs().maxCoeff();
        previous = now;
    }
    EXPECT_NEAR(last_step, config.learning_rate, 0.01 * config.learning_rate);
}

TEST(Adam, RejectsBadInputs)
{
    auto params = VaeParams::zeros(2, 4);
    auto state = AdamState::zeros_like(params);
    EXPECT_THROW(adam_step(params, VaeParams::zeros(3, 4), state, TrainConfig{}, 1), ShapeError);
    EXPECT_THROW(adam_step(params, VaeParams::zeros(2, 4), state, TrainConfig{}, 0), ConfigError);
}

TEST(TrainConfig, Validation)
{
    TrainConfig c;
    EXPECT_NO_THROW(c.validate(3000));
    c.epochs = 0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = TrainConfig{};
    EXPECT_THROW(c.validate(50), ConfigError);
    c.learning_rate = 0.0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = TrainConfig{};
    c.latent_dim = 0;
    EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Train, ZeroEpochsRejected)
{
    auto config = quick_config(0);
    EXPECT_THROW(train(small_cohort(10), config), ConfigError);
    EXPECT_THROW(train(Cohort{}, quick_config(1)), ConfigError);
}

TEST(Train, SingleSampleMemorization)
{
    Cohort one;
    one.records.push_back(small_cohort(1).records[2]);
    TrainConfig config;
    config.epochs = 200;
    config.batch_size = 1;
    config.seed = 11;
    const auto result = train(one, config);
    ASSERT_EQ(result.history.size(), 200u);
    EXPECT_LT(result.history.back().recon, result.history.front().recon);
}

TEST(Train, HistoryFiniteAndDeterministic)
{
    const auto cohort = small_cohort(40);
    const auto config = quick_config(15, 25);
    int calls = 0;
    const auto a = train(cohort, config, [&](const EpochLoss& e) { EXPECT_EQ(e.epoch, ++calls); });
    const auto b = train(cohort, config);
    EXPECT_EQ(calls, 15);
    EXPECT_EQ(flatten(a.params), flatten(b.params));
    ASSERT_EQ(a.history.size(), b.history.size());
    for (std::size_t i = 0; i < a.history.size(); ++i) {
        const auto& e = a.history[i];
        EXPECT_EQ(e.total, b.history[i].total);
        EXPECT_TRUE(std::isfinite(e.total));
        EXPECT_GE(e.kl, 0.0);
        EXPECT_NEAR(e.total, e.kl + e.recon, 1e-9);
    }
}

TEST(Train, LossHistoryCsv)
{
    const LossHistory h{{1, 4.0, 0.5, 3.5}, {2, 3.25, 0.25, 3.0}};
    EXPECT_EQ(loss_history_to_csv(h), "epoch,total,kl,recon\n1,4,0.5,3.5\n2,3.25,0.25,3\n");
}

TEST(Shuffle, EachEpochIsAPermutation)
{
    Rng rng(7);
    std::vector<std::size_t> order(257);
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto identity = order;
    for (int epoch = 0; epoch < 20; ++epoch) {
        shuffle_order(order, rng);
        auto sorted = order;
        std::sort(sorted.begin(), sorted.end());
        ASSERT_EQ(sorted, identity);
    }
    EXPECT_NE(order, identity);
    std::vector<std::size_t> empty;
    shuffle_order(empty, rng);
    EXPECT_TRUE(empty.empty());
}

TEST(CompareDims, SingletonMatchesDirectTrain)
{
    const auto cohort = small_cohort(20);
    auto config = quick_config(5);
    config.latent_dim = 7; // overridden by the dims list
    const auto runs = compare_latent_dims(cohort, config, {3});
    ASSERT_EQ(runs.size(), 1u);
    config.latent_dim = 3;
    const auto direct = train(cohort, config);
    EXPECT_EQ(runs[0].latent_dim, 3);
    EXPECT_EQ(flatten(runs[0].result.params), flatten(direct.params));
    ASSERT_EQ(runs[0].result.history.size(), direct.history.size());
    for (std::size_t i = 0; i < direct.history.size(); ++i) {
        EXPECT_EQ(runs[0].result.history[i].total, direct.history[i].total);
    }
}

TEST(CompareDims, AlignedHistories)
{
    const auto cohort = small_cohort(20);
    const auto runs = compare_latent_dims(cohort, quick_config(6), {2, 3, 4});
    ASSERT_EQ(runs.size(), 3u);
    for (const auto& r : runs) {
        EXPECT_EQ(r.result.history.size(), 6u);
        EXPECT_EQ(r.result.params.latent_dim, r.latent_dim);
    }
    EXPECT_THROW(compare_latent_dims(cohort, quick_config(1), {}), ConfigError);
}

TEST(CompareDims, Observations)
{
    LatentDimRun run;
    run.latent_dim = 2;
    for (int e = 1; e <= 20; ++e) {
        run.result.history.push_back({e, 10.0 / e + 1.0, 0.1, 0.0});
    }
    const auto obs = observe_latent_dims({run});
    ASSERT_EQ(obs.size(), 1u);
    double tail = 0.0;
    for (int e = 11; e <= 20; ++e) {
        tail += 10.0 / e + 1.0;
    }
    tail /= 10.0;
    EXPECT_NEAR(obs[0].tail_mean_total, tail, 1e-12);
    EXPECT_EQ(obs[0].final_total, 1.5);
    // First epoch whose total is within 1% above the tail mean.
    int settle = 0;
    for (int e = 1; e <= 20; ++e) {
        if (10.0 / e + 1.0 <= tail * 1.01) {
            settle = e;
            break;
        }
    }
    EXPECT_EQ(obs[0].epochs_to_settle, settle);
    const auto report = latent_dim_report(obs);
    EXPECT_NE(report.find("# lowest final reconstruction loss: J=2"), std::string::npos);
}

} // namespace
} // namespace maculavae
