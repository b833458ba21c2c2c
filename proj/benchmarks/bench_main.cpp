#include <benchmark/benchmark.h>

#include "mcvd/analytic.hpp"
#include "mcvd/montecarlo.hpp"
#include "mcvd/topology.hpp"

using namespace mcvd;

namespace {

void BM_NormalDraw(benchmark::State& state) {
  rng::MoleculeStream stream(1, 0, 0);
  for (auto _ : state) benchmark::DoNotOptimize(stream.normal());
}
BENCHMARK(BM_NormalDraw);

void BM_StreamSetup(benchmark::State& state) {
  std::uint32_t m = 0;
  for (auto _ : state) {
    rng::MoleculeStream stream(1, 0, m++);
    benchmark::DoNotOptimize(stream.bits());
  }
}
BENCHMARK(BM_StreamSetup);

void BM_ResolveStepNearWall(benchmark::State& state) {
  const auto built = experiments::build_topology(experiments::paper_topology(experiments::TopologyId::TwoPlane));
  const auto& env = built.environment;
  rng::MoleculeStream stream(2, 0, 0);
  const double sigma = std::sqrt(2 * 79.4 * 1e-5);
  geometry::Vec3 pos{0.05, 8, 0};
  for (auto _ : state) {
    const auto out = montecarlo::resolve_step(pos, montecarlo::brownian_step(pos, sigma, stream), env);
    benchmark::DoNotOptimize(out);
  }
}
BENCHMARK(BM_ResolveStepNearWall);

void BM_HalfSpaceCdf(benchmark::State& state) {
  const auto model = *experiments::build_topology(experiments::paper_topology(experiments::TopologyId::T2)).model;
  double t = 0.0;
  for (auto _ : state) {
    t = t >= 2.0 ? 1e-3 : t + 1e-3;
    benchmark::DoNotOptimize(model.cdf(t));
  }
}
BENCHMARK(BM_HalfSpaceCdf);

void BM_TwoPlaneCdf(benchmark::State& state) {
  const auto spec = experiments::paper_topology(experiments::TopologyId::TwoPlane, std::nullopt,
                                                std::nullopt, static_cast<int>(state.range(0)));
  const auto model = *experiments::build_topology(spec).model;
  double t = 0.0;
  for (auto _ : state) {
    t = t >= 2.0 ? 1e-3 : t + 1e-3;
    benchmark::DoNotOptimize(model.cdf(t));
  }
}
BENCHMARK(BM_TwoPlaneCdf)->Arg(3)->Arg(11);

// Molecule-steps per second for a short desk-scale run on one thread.
void BM_SimulateT2(benchmark::State& state) {
  const auto env = experiments::build_topology(experiments::paper_topology(experiments::TopologyId::T2)).environment;
  montecarlo::SimConfig cfg;
  cfg.n_molecules = 2000;
  cfg.n_reps = 1;
  cfg.t_total = 0.5;
  cfg.threads = 1;
  cfg.jump_safety = static_cast<double>(state.range(0));
  std::uint64_t steps = 0;
  for (auto _ : state) {
    const auto h = montecarlo::simulate(env, cfg);
    steps += h.diagnostics.steps;
  }
  state.counters["segments/s"] = benchmark::Counter(static_cast<double>(steps), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_SimulateT2)->Arg(0)->Arg(6)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
