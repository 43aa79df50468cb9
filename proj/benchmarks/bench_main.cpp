#include <map>

#include <benchmark/benchmark.h>

#include "vortex/fgr.hpp"
#include "vortex/linop.hpp"
#include "vortex/profiles.hpp"
#include "vortex/spectra.hpp"

using namespace vortex;

namespace {

const profiles::NonlinearityModel kCq = profiles::NonlinearityModel::cubic_quintic();

const profiles::RadialProfile& profile(int n) {
  static std::map<int, profiles::RadialProfile> cache;
  auto it = cache.find(n);
  if (it == cache.end()) {
    const profiles::RadialGrid grid(n, 0.1 * n);
    it = cache.emplace(n, profiles::solve_profile(kCq, profiles::RadialPotential::none(), 0.16, 1, grid)).first;
  }
  return it->second;
}

}  // namespace

static void BM_SolveProfile(benchmark::State& state) {
  const profiles::RadialGrid grid(state.range(0), 0.1 * state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(profiles::solve_profile(kCq, profiles::RadialPotential::none(), 0.16, 1, grid));
}
BENCHMARK(BM_SolveProfile)->Arg(250)->Arg(500)->Unit(benchmark::kMillisecond);

static void BM_AssembleBlock(benchmark::State& state) {
  const auto& p = profile(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(linop::assemble_block(p, profiles::RadialPotential::none(), kCq, 2));
}
BENCHMARK(BM_AssembleBlock)->Arg(250)->Arg(500)->Unit(benchmark::kMillisecond);

static void BM_PointSpectrum(benchmark::State& state) {
  const auto block = linop::assemble_block(profile(state.range(0)), profiles::RadialPotential::none(), kCq, 2);
  for (auto _ : state) benchmark::DoNotOptimize(spectra::point_spectrum(block));
}
BENCHMARK(BM_PointSpectrum)->Arg(150)->Arg(300)->Unit(benchmark::kMillisecond);

static void BM_FgrConstant(benchmark::State& state) {
  const auto G = fgr::Coupling::gaussian(1.0, 1.0, 0.3, -0.2);
  fgr::QuadratureConfig cfg;
  cfg.grid.n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(fgr::fgr_constant(G, cfg));
}
BENCHMARK(BM_FgrConstant)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_Model1Steps(benchmark::State& state) {
  fgr::Model1Config cfg;
  cfg.grid = {120.0, static_cast<int>(state.range(0))};
  cfg.t_final = 5.0;
  cfg.sample_every = 100;
  for (auto _ : state) benchmark::DoNotOptimize(fgr::simulate_model1(cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(cfg.t_final / cfg.dt));
}
BENCHMARK(BM_Model1Steps)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_CheckH12(benchmark::State& state) {
  const std::vector<double> lambdas = {0.0178, 0.0238, 0.0531, 0.0714};
  for (auto _ : state) benchmark::DoNotOptimize(spectra::check_h12(lambdas, 12, 1e-9, state.range(0)));
}
BENCHMARK(BM_CheckH12)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
