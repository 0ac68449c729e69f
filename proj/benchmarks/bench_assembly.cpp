// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "bench_common.hpp"

using namespace liner;

static void BM_Operators(benchmark::State &state)
{
  const CylinderMesh mesh = generate(bench::duct(static_cast<int>(state.range(0))));
  const BoundaryMeasure measure = build_measure(mesh, 1.0);
  for (auto _ : state)
  {
    FormOperators ops(mesh, measure);
    benchmark::DoNotOptimize(ops.num_lateral());
  }
  state.counters["nodes"] = static_cast<double>(mesh.num_nodes());
}
BENCHMARK(BM_Operators)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

static void BM_Assemble(benchmark::State &state)
{
  const bench::Model model(bench::duct(static_cast<int>(state.range(0))));
  const DerivedParams derived = derive(bench::physics());
  const LinerDensity chi = uniform_density(model.ops, 0.5);
  const SourceData sources = bench::inflow(model.mesh);
  for (auto _ : state)
  {
    AssembledSystem system = assemble(model.ops, derived, bench::physics().beta_v, chi, sources);
    benchmark::DoNotOptimize(system.matrix.nonZeros());
  }
  state.counters["nodes"] = static_cast<double>(model.mesh.num_nodes());
}
BENCHMARK(BM_Assemble)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
