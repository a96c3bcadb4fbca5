#include <benchmark/benchmark.h>

#include <set>

#include "flowrep/capture.hpp"
#include "flowrep/represent.hpp"
#include "flowrep/synth.hpp"

namespace {

std::vector<flowrep::Flow> bench_flows(int n_flows) {
    const flowrep::Scenario s = flowrep::make_scenario("ddos-syn", n_flows, 1, 1);
    const flowrep::SynthResult gen = flowrep::generate(s.train, 42);
    std::set<uint32_t> monitored(gen.monitored_src.begin(), gen.monitored_src.end());
    return flowrep::assemble_flows(gen.packets, monitored);
}

void BM_BuildMatrixIatSize(benchmark::State& state) {
    const auto flows = bench_flows(static_cast<int>(state.range(0)));
    const flowrep::RepresentationSpec spec{flowrep::ReprKind::IatSize, false, false, 15, 0.0};
    for (auto _ : state) {
        auto m = flowrep::build_matrix(flows, spec);
        benchmark::DoNotOptimize(m.rows.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BuildMatrixIatSize)->Arg(100)->Arg(400)->Arg(800);

void BM_BuildMatrixSampSizeFft(benchmark::State& state) {
    const auto flows = bench_flows(static_cast<int>(state.range(0)));
    const flowrep::RepresentationSpec spec{flowrep::ReprKind::SampSize, true, true, 15, 0.3};
    for (auto _ : state) {
        auto m = flowrep::build_matrix(flows, spec);
        benchmark::DoNotOptimize(m.rows.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BuildMatrixSampSizeFft)->Arg(400);

void BM_FftMagnitudes(benchmark::State& state) {
    Eigen::VectorXd x(state.range(0));
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        x[i] = std::sin(0.37 * static_cast<double>(i));
    }
    for (auto _ : state) {
        auto mags = flowrep::fft_magnitudes(x);
        benchmark::DoNotOptimize(mags.data());
    }
}
BENCHMARK(BM_FftMagnitudes)->Arg(14)->Arg(29)->Arg(148);

void BM_ParsePcap(benchmark::State& state) {
    const flowrep::Scenario s =
        flowrep::make_scenario("ddos-syn", static_cast<int>(state.range(0)), 1, 1);
    const auto bytes = flowrep::encode_pcap(flowrep::generate(s.train, 7).packets);
    for (auto _ : state) {
        auto parsed = flowrep::parse_pcap(bytes);
        benchmark::DoNotOptimize(parsed.packets.data());
    }
    state.SetBytesProcessed(state.iterations() * static_cast<int64_t>(bytes.size()));
}
BENCHMARK(BM_ParsePcap)->Arg(200)->Arg(800);

}  // namespace
