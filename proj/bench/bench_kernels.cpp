// Parallel kernels against their serial references.

#include <benchmark/benchmark.h>
#include <omp.h>

#include "elmprune/data.hpp"
#include "elmprune/elm.hpp"
#include "elmprune/experiments.hpp"
#include "elmprune/linalg.hpp"

namespace {

using namespace elmprune;

Matrix inputs(std::size_t dims, std::size_t samples) {
  const Dataset d = data::add_junk_features(data::gen_two_moons(samples / 2, 0.1, 1), dims - 2, 2);
  return d.x();
}

void BM_HiddenOutput(benchmark::State& state) {
  const auto neurons = static_cast<std::size_t>(state.range(0));
  const Matrix x = inputs(102, 400);
  const auto layer = init_hidden(neurons, 102, Activation::kTanh, 3);
  for (auto _ : state) benchmark::DoNotOptimize(hidden_output(layer, x));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(neurons) * 400);
}

void BM_HiddenOutputReference(benchmark::State& state) {
  const auto neurons = static_cast<std::size_t>(state.range(0));
  const Matrix x = inputs(102, 400);
  const auto layer = init_hidden(neurons, 102, Activation::kTanh, 3);
  for (auto _ : state) benchmark::DoNotOptimize(reference::hidden_output(layer, x));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(neurons) * 400);
}

void BM_MinNormLsq(benchmark::State& state) {
  const auto neurons = static_cast<std::size_t>(state.range(0));
  const Dataset d = data::add_junk_features(data::gen_two_moons(50, 0.1, 1), 100, 2);
  const Matrix h = hidden_output(init_hidden(neurons, d.dims(), Activation::kTanh, 4), d.x());
  for (auto _ : state) benchmark::DoNotOptimize(linalg::min_norm_lsq(h, d.y()));
}

// Whole size sweep with the seed cells run on `threads` threads (1 = serial).
void BM_SizeSweep(benchmark::State& state) {
  experiments::ExperimentConfig c;
  c.kind = experiments::ExperimentKind::kSizeSweep;
  c.mstar = 400;
  c.grid = experiments::GridSpec::parse("list:25,100,400");
  c.seeds = {1, 2, 3, 4, 5, 6, 7, 8};
  c.threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(experiments::run(c));
}

BENCHMARK(BM_HiddenOutput)->Arg(100)->Arg(1000)->Arg(4000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_HiddenOutputReference)->Arg(100)->Arg(1000)->Arg(4000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_MinNormLsq)->Arg(50)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SizeSweep)
    ->Arg(1)
    ->Arg(omp_get_num_procs())
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
