#include <benchmark/benchmark.h>

#include <cmath>

#include "envstab/certifier.hpp"
#include "envstab/envelope.hpp"
#include "envstab/numerics.hpp"
#include "envstab/periodic_system.hpp"

using namespace envstab;

namespace {

PopulationModel ricker(double r) { return make_model(ModelFamily::Ricker, {{"r", r}}); }
PopulationModel bh(double mu, double c) {
  return make_model(ModelFamily::GeneralizedBevertonHolt, {{"mu", mu}, {"c", c}});
}

}  // namespace

static void BM_CertifyRickerTriple(benchmark::State& state) {
  auto sys = make_system({ricker(1.8), ricker(1.2), ricker(0.5)});
  GridConfig cfg;
  cfg.seed_cells = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto cert = certify_global_stability(sys, {make_mobius(0.5)}, cfg);
    benchmark::DoNotOptimize(cert.status);
  }
}
BENCHMARK(BM_CertifyRickerTriple)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

static void BM_FitMobiusBevertonHoltPair(benchmark::State& state) {
  auto sys = make_system({bh(1.1, 7.5), bh(7.0, 2.3)});
  GridConfig cfg;
  cfg.seed_cells = 1024;
  for (auto _ : state) {
    auto fit = fit_mobius(sys, static_cast<std::size_t>(state.range(0)), cfg);
    benchmark::DoNotOptimize(fit.feasible_points);
  }
}
BENCHMARK(BM_FitMobiusBevertonHoltPair)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_ScanRoots(benchmark::State& state) {
  auto g = [](double x) { return std::sin(40.0 * x) * std::exp(-x); };
  const int cells = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto roots = scan_roots(g, {0.0, 10.0}, cells, 1e-12);
    benchmark::DoNotOptimize(roots.data());
  }
  state.SetItemsProcessed(state.iterations() * cells);
}
BENCHMARK(BM_ScanRoots)->Range(1 << 10, 1 << 16);

static void BM_FixedPointsBevertonHoltPair(benchmark::State& state) {
  auto sys = make_system({bh(1.1, 7.5), bh(7.0, 2.3)});
  GridConfig cfg;
  cfg.seed_cells = static_cast<int>(std::ceil(sys.working_interval().length() / 1e-4));
  for (auto _ : state) {
    auto scan = find_fixed_points(sys, cfg);
    benchmark::DoNotOptimize(scan.points.data());
  }
}
BENCHMARK(BM_FixedPointsBevertonHoltPair)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
