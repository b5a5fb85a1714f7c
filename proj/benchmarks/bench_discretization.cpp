#include <benchmark/benchmark.h>

#include "thermofrac/mpfa.hpp"
#include "thermofrac/mpsa.hpp"
#include "thermofrac/simulation.hpp"
#include "thermofrac/verify.hpp"

using namespace thermofrac;

namespace {

Problem speed_case(int n) {
  SpeedSetup s;
  s.h = 1.0 / n;
  return speed_problem(s);
}

void BM_MpfaDiscretize(benchmark::State& state) {
  const Problem p = speed_case(static_cast<int>(state.range(0)));
  const auto& g = p.grid.matrix;
  const auto k = isotropic_tensors(std::vector<double>(g.num_cells(), 1.0));
  for (auto _ : state) {
    Mpfa mpfa;
    mpfa.discretize(g, k, p.flow.kinds);
    benchmark::DoNotOptimize(mpfa.operators().flux.nonZeros());
  }
  state.SetComplexityN(g.num_cells());
}
BENCHMARK(BM_MpfaDiscretize)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_MpsaDiscretize(benchmark::State& state) {
  const Problem p = speed_case(static_cast<int>(state.range(0)));
  const auto& g = p.grid.matrix;
  const Lame lame{p.params.lame_lambda(), p.params.shear_modulus()};
  for (auto _ : state) {
    Mpsa mpsa;
    mpsa.discretize(g, std::vector<Lame>(g.num_cells(), lame), p.mech.kinds);
    benchmark::DoNotOptimize(mpsa.operators().stress.nonZeros());
  }
}
BENCHMARK(BM_MpsaDiscretize)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_LocalRediscretisation(benchmark::State& state) {
  const Problem p = speed_case(static_cast<int>(state.range(0)));
  Discretization disc;
  disc.build(p);
  const auto& fr = p.grid.fractures[0];
  const int node = fr.face_matrix_node.back();
  for (auto _ : state) {
    disc.update(p, {node});
    benchmark::DoNotOptimize(disc.revision());
  }
}
BENCHMARK(BM_LocalRediscretisation)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_Assemble(benchmark::State& state) {
  const Problem p = speed_case(static_cast<int>(state.range(0)));
  Discretization disc;
  disc.build(p);
  const DofLayout layout(p.grid);
  const Vec x = initial_state(p, layout);
  StepData step;
  step.dt = 25.0;
  step.x_prev = x;
  step.divu_prev = cell_divergence(p, disc, layout, x);
  const auto regimes = classify_all(p, layout, x, x);
  for (auto _ : state) {
    auto sys = assemble(p, disc, layout, x, step, regimes);
    benchmark::DoNotOptimize(sys.residual.data());
  }
}
BENCHMARK(BM_Assemble)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_FactorizeAndSolve(benchmark::State& state) {
  const Problem p = speed_case(static_cast<int>(state.range(0)));
  Discretization disc;
  disc.build(p);
  const DofLayout layout(p.grid);
  const Vec x = initial_state(p, layout);
  StepData step;
  step.dt = 25.0;
  step.x_prev = x;
  step.divu_prev = cell_divergence(p, disc, layout, x);
  const auto sys = assemble(p, disc, layout, x, step, classify_all(p, layout, x, x));
  for (auto _ : state) {
    LinearSolver solver;
    solver.factorize(sys.jacobian, &layout);
    benchmark::DoNotOptimize(solver.solve(-sys.residual).data());
  }
}
BENCHMARK(BM_FactorizeAndSolve)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_SneddonSolve(benchmark::State& state) {
  SneddonSetup s;
  s.h = 1.25 / static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_sneddon(s).error_i);
}
BENCHMARK(BM_SneddonSolve)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
