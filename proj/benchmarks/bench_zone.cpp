// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "liner/admissibility.hpp"

using namespace liner;

static void BM_RasterFinite(benchmark::State &state)
{
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state)
  {
    ZoneRaster raster = rasterize_zone(1.0, n);
    benchmark::DoNotOptimize(raster.member.data());
  }
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_RasterFinite)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

static void BM_RasterLimit(benchmark::State &state)
{
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state)
  {
    ZoneRaster raster = rasterize_zone(RatioLimit::PlusInfinity, n);
    benchmark::DoNotOptimize(raster.member.data());
  }
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_RasterLimit)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
