#include <benchmark/benchmark.h>

#include "pichange/detector.hpp"
#include "pichange/simulate.hpp"

using namespace pichange;

namespace {

SimulatedSeries make_series(std::size_t cycles, std::uint64_t seed) {
  ScenarioSpec spec;
  spec.contrast = Contrast::Moderate;
  spec.n_cycles = cycles;
  spec.seed = seed;
  spec.prior_mode = PriorMode::Accurate;
  Rng rng = Rng::for_series(seed, 0);
  return generate_series(spec, rng);
}

DetectorConfig make_config(const SimulatedSeries& sim, bool prune, double lambda_scale) {
  std::vector<KernelSpec> kernels;
  for (std::size_t c : sim.prior_centers) kernels.push_back({c, 30.0});
  const double beta = modified_bic_beta(static_cast<double>(sim.series.size()), 2);
  DetectorConfig config;
  config.cost_model = CostModel::ZagNLL;
  config.penalty = build_profile(sim.series.size(), kernels, lambda_scale * beta, beta);
  config.zag_shape = sim.shape;
  config.pruning_enabled = prune;
  return config;
}

void BM_DetectPruned(benchmark::State& state) {
  const auto sim = make_series(static_cast<std::size_t>(state.range(0)), 17);
  const auto config = make_config(sim, true, 1.0);
  const CostCache cache = build_cache(sim.series, CostModel::ZagNLL, sim.shape);
  for (auto _ : state) {
    benchmark::DoNotOptimize(detect(sim.series, cache, config));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(sim.series.size()));
}
BENCHMARK(BM_DetectPruned)->Arg(2)->Arg(7)->Arg(14);

void BM_DetectUnpruned(benchmark::State& state) {
  const auto sim = make_series(static_cast<std::size_t>(state.range(0)), 17);
  const auto config = make_config(sim, false, 1.0);
  const CostCache cache = build_cache(sim.series, CostModel::ZagNLL, sim.shape);
  for (auto _ : state) {
    benchmark::DoNotOptimize(detect(sim.series, cache, config));
  }
}
BENCHMARK(BM_DetectUnpruned)->Arg(2)->Arg(4);

void BM_SegmentCostZag(benchmark::State& state) {
  const auto sim = make_series(7, 3);
  const CostCache cache = build_cache(sim.series, CostModel::ZagNLL, sim.shape);
  const std::size_t n = cache.size();
  std::size_t s = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(cache.segment_cost(s, n / 2 + s % (n / 2)));
    s = s % (n / 2) + 1;
  }
}
BENCHMARK(BM_SegmentCostZag);

void BM_BuildProfile(benchmark::State& state) {
  const auto sim = make_series(7, 5);
  std::vector<KernelSpec> kernels;
  for (std::size_t c : sim.prior_centers) kernels.push_back({c, 30.0});
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_profile(sim.series.size(), kernels, 30.0, 30.0));
  }
}
BENCHMARK(BM_BuildProfile);

}  // namespace

BENCHMARK_MAIN();
