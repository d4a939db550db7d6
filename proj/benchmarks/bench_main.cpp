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

#include <benchmark/benchmark.h>

#include "maculavae/clustering.hpp"
#include "maculavae/datagen.hpp"
#include "maculavae/trainer.hpp"
#include "maculavae/vae.hpp"

namespace maculavae {
namespace {

void BM_GenerateCohort(benchmark::State& state)
{
    const auto models = default_disease_models();
    const auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(generate_cohort(models, n, 42));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(3 * n));
}
BENCHMARK(BM_GenerateCohort)->Arg(1000)->Arg(10000);

void BM_BatchLossAndGradients(benchmark::State& state)
{
    const int batch = static_cast<int>(state.range(0));
    const auto params = init_params(3, kDefaultHiddenDim, 1);
    Rng rng(2);
    Eigen::MatrixXd inputs(kInputDim, batch);
    Eigen::MatrixXd eps(3, batch);
    for (Eigen::Index i = 0; i < inputs.size(); ++i) {
        inputs(i) = rng.uniform();
    }
    for (Eigen::Index i = 0; i < eps.size(); ++i) {
        eps(i) = rng.normal();
    }
    BatchWorkspace ws;
    BatchLoss out;
    for (auto _ : state) {
        batch_loss_and_gradients(params, inputs, eps, LossTerms::Full, ws, out);
        benchmark::DoNotOptimize(out.mean.total);
    }
    state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(BM_BatchLossAndGradients)->Arg(1)->Arg(100);

void BM_TrainEpoch(benchmark::State& state)
{
    const auto cohort = generate_cohort(default_disease_models(), 1000, 42);
    TrainConfig config;
    config.epochs = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(train(cohort, config).history.back().total);
    }
}
BENCHMARK(BM_TrainEpoch)->Unit(benchmark::kMillisecond);

void BM_KmeansBestOf(benchmark::State& state)
{
    Rng rng(3);
    Eigen::MatrixXd points(3000, 3);
    for (Eigen::Index i = 0; i < points.size(); ++i) {
        points(i) = rng.normal();
    }
    const int k = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(kmeans_best_of(points, k, 42, 10).inertia);
    }
}
BENCHMARK(BM_KmeansBestOf)->Arg(14)->Unit(benchmark::kMillisecond);

} // namespace
} // namespace maculavae

BENCHMARK_MAIN();
