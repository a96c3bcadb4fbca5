#include <benchmark/benchmark.h>

#include "flowrep/detect/gmm.hpp"
#include "flowrep/detect/iforest.hpp"
#include "flowrep/detect/kde.hpp"
#include "flowrep/detect/ocsvm.hpp"
#include "flowrep/rng.hpp"

namespace {

Eigen::MatrixXd bench_data(int n, int d, uint64_t seed) {
    flowrep::Rng rng(seed);
    Eigen::MatrixXd X(n, d);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) X(i, j) = rng.normal(0.0, 1.0);
    }
    return X;
}

void BM_OcsvmTrain(benchmark::State& state) {
    const auto X = bench_data(static_cast<int>(state.range(0)), 15, 1);
    for (auto _ : state) {
        auto model = flowrep::ocsvm_train(X, 2.0, 0.5);
        benchmark::DoNotOptimize(model.rho);
    }
}
BENCHMARK(BM_OcsvmTrain)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);

void BM_KdeScoreBatch(benchmark::State& state) {
    const auto X = bench_data(static_cast<int>(state.range(0)), 15, 2);
    const auto queries = bench_data(400, 15, 3);
    const flowrep::KdeModel model = flowrep::kde_train(X, 2.0);
    for (auto _ : state) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < queries.rows(); ++i) {
            acc += model.score(queries.row(i).transpose());
        }
        benchmark::DoNotOptimize(acc);
    }
    state.SetItemsProcessed(state.iterations() * 400);
}
BENCHMARK(BM_KdeScoreBatch)->Arg(800)->Unit(benchmark::kMillisecond);

void BM_GmmTrain(benchmark::State& state) {
    const auto X = bench_data(800, 15, 4);
    for (auto _ : state) {
        auto model = flowrep::gmm_train(X, static_cast<int>(state.range(0)), 1e-6, 5);
        benchmark::DoNotOptimize(model.weights.data());
    }
}
BENCHMARK(BM_GmmTrain)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_IsolationForestTrain(benchmark::State& state) {
    const auto X = bench_data(800, 15, 6);
    for (auto _ : state) {
        auto model = flowrep::if_train(X, static_cast<int>(state.range(0)), 256, 7);
        benchmark::DoNotOptimize(model.trees.data());
    }
}
BENCHMARK(BM_IsolationForestTrain)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);

}  // namespace
