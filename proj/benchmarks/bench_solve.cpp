// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "bench_common.hpp"
#include "liner/solver.hpp"

using namespace liner;

static void BM_FactorizeAndSolve(benchmark::State &state)
{
  const bench::Model model(bench::duct(static_cast<int>(state.range(0))));
  const DerivedParams derived = derive(bench::physics());
  const AssembledSystem system =
      assemble(model.ops, derived, bench::physics().beta_v, uniform_density(model.ops, 0.5),
               bench::inflow(model.mesh));
  for (auto _ : state)
  {
    SolutionField u = solve(system);
    benchmark::DoNotOptimize(u.values.data());
  }
  state.counters["free"] = static_cast<double>(system.num_free());
}
BENCHMARK(BM_FactorizeAndSolve)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

// Reuse of one factorization, as in the gradient's adjoint solve.
static void BM_AdjointSolve(benchmark::State &state)
{
  const bench::Model model(bench::duct(static_cast<int>(state.range(0))));
  const DerivedParams derived = derive(bench::physics());
  const AssembledSystem system =
      assemble(model.ops, derived, bench::physics().beta_v, uniform_density(model.ops, 0.5),
               bench::inflow(model.mesh));
  const SparseFactorization lu(system.matrix);
  for (auto _ : state)
  {
    Eigen::VectorXcd x = lu.solve(system.rhs, true);
    benchmark::DoNotOptimize(x.data());
  }
}
BENCHMARK(BM_AdjointSolve)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
