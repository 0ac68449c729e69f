// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>
#include <stdexcept>

#include "liner/energy.hpp"
#include "liner/parallel.hpp"
#include "liner/solver.hpp"
#include "support.hpp"

namespace liner
{
namespace
{

// Restores the thread limit after each test.
class Threads : public ::testing::Test
{
protected:
  void SetUp() override { unsetenv("LINERSOLVE_THREADS"); }
  void TearDown() override
  {
    unsetenv("LINERSOLVE_THREADS");
    set_thread_limit(0);
  }
};

TEST_F(Threads, EnvironmentOverridesRequest)
{
  set_thread_limit(3);
  EXPECT_EQ(thread_limit(), 3u);
  setenv("LINERSOLVE_THREADS", "2", 1);
  EXPECT_EQ(thread_limit(), 2u);
  setenv("LINERSOLVE_THREADS", "junk", 1);
  EXPECT_EQ(thread_limit(), 3u);
}

TEST_F(Threads, VisitsEveryIndexOnce)
{
  set_thread_limit(4);
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; });
  for (const auto &h : hits) EXPECT_EQ(h.load(), 1);
}

TEST_F(Threads, PropagatesExceptions)
{
  set_thread_limit(4);
  EXPECT_THROW(parallel_for(100,
                            [](std::size_t i) {
                              if (i == 37) throw std::runtime_error("boom");
                            }),
               std::runtime_error);
}

TEST_F(Threads, ResultsIndependentOfThreadCount)
{
  const testing::Model s(testing::small_spec(1));
  const DerivedParams d = derive(testing::reference_physics());
  std::mt19937_64 rng(51);
  const LinerDensity chi{testing::random_chi(s.ops.num_lateral(), rng), 0.0};
  SourceData src = SourceData::zero(s.mesh.num_nodes());
  src.g.setConstant(1.0);
  EnergySpec band;
  band.k_min = 0.8;
  band.k_max = 1.2;
  band.n_quad = 4;

  auto run = [&](unsigned threads) {
    set_thread_limit(threads);
    const FormOperators ops(s.mesh, s.measure);
    const AssembledSystem sys = assemble(ops, d, Complex(0.5, 0.5), chi, src);
    Problem problem{&ops, d, Complex(0.5, 0.5), src, std::nullopt};
    return std::make_tuple(Eigen::MatrixXcd(sys.full()), solve(sys).values,
                           total_energy(band, problem, chi).total);
  };
  const auto [m1, u1, j1] = run(1);
  const auto [m4, u4, j4] = run(4);
  EXPECT_EQ((m1 - m4).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ((u1 - u4).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(j1, j4);
}

}  // namespace
}  // namespace liner
