// OpenMP path kernel against the serial reference. Before timing, checks that
// both produce bit-identical ensembles.
#include <benchmark/benchmark.h>

#include <cstdio>
#include <cstring>

#include "belgrad/fixtures.hpp"
#include "belgrad/regularization.hpp"
#include "belgrad/simulation.hpp"

using namespace belgrad;

namespace {

const RegularizedModel& model_for(int which) {
  static const RegularizedModel ou = regularize(ou_fixture().model, 8);
  static const RegularizedModel bm = regularize(brownian_fixture().model, 8);
  static const RegularizedModel cx = regularize_with(counterexample_fixture().model, 238, {});
  return which == 0 ? ou : which == 1 ? bm : cx;
}

const char* name_for(int which) { return which == 0 ? "ou" : which == 1 ? "bm" : "counterexample"; }

SimConfig config(std::size_t paths) {
  SimConfig cfg;
  cfg.t_final = 0.5;
  cfg.dt = 1e-3;
  cfg.n_paths = paths;
  return cfg;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

bool identical(const PathEnsemble& a, const PathEnsemble& b) {
  if (a.n_paths() != b.n_paths()) return false;
  for (std::size_t k = 0; k < a.n_paths(); ++k) {
    const AugmentedPath& p = a.paths[k];
    const AugmentedPath& q = b.paths[k];
    for (int i = 0; i < p.x.size(); ++i)
      if (!same_bits(p.x[i], q.x[i]) || !same_bits(p.eta[i], q.eta[i])) return false;
    if (!same_bits(p.beta, q.beta) || !same_bits(p.bel, q.bel)) return false;
  }
  return true;
}

void BM_parallel(benchmark::State& state) {
  const RegularizedModel& m = model_for(static_cast<int>(state.range(0)));
  const SimConfig cfg = config(static_cast<std::size_t>(state.range(1)));
  const Vec x = zero_vec(m.coefficients.dim);
  const Vec h = unit_vec(m.coefficients.dim, 0);
  for (auto _ : state) benchmark::DoNotOptimize(simulate_ensemble(m, x, h, cfg));
  state.SetLabel(name_for(static_cast<int>(state.range(0))));
  state.SetItemsProcessed(state.iterations() * state.range(1) * 500);
}

void BM_serial(benchmark::State& state) {
  const RegularizedModel& m = model_for(static_cast<int>(state.range(0)));
  const SimConfig cfg = config(static_cast<std::size_t>(state.range(1)));
  const Vec x = zero_vec(m.coefficients.dim);
  const Vec h = unit_vec(m.coefficients.dim, 0);
  for (auto _ : state) benchmark::DoNotOptimize(simulate_ensemble_serial(m, x, h, cfg));
  state.SetLabel(name_for(static_cast<int>(state.range(0))));
  state.SetItemsProcessed(state.iterations() * state.range(1) * 500);
}

}  // namespace

BENCHMARK(BM_parallel)->ArgsProduct({{0, 1, 2}, {2000}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_serial)->ArgsProduct({{0, 1, 2}, {2000}})->Unit(benchmark::kMillisecond);

int main(int argc, char** argv) {
  for (int which = 0; which < 3; ++which) {
    const RegularizedModel& m = model_for(which);
    const SimConfig cfg = config(500);
    const Vec x = zero_vec(m.coefficients.dim);
    const Vec h = unit_vec(m.coefficients.dim, 0);
    if (!identical(simulate_ensemble(m, x, h, cfg), simulate_ensemble_serial(m, x, h, cfg))) {
      std::fprintf(stderr, "%s: parallel and serial ensembles differ\n", name_for(which));
      return 1;
    }
  }
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
