// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <json.hpp>

#include "liner/error.hpp"
#include "liner/optimize.hpp"
#include "support.hpp"

namespace liner
{
namespace
{

using testing::Model;

std::vector<double> random_weights(std::size_t n, std::mt19937_64 &rng)
{
  std::uniform_real_distribution<double> u(0.2, 2.0);
  std::vector<double> w(n);
  for (double &x : w) x = u(rng);
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (double &x : w) x /= total;
  return w;
}

// Enumerates every assignment of facets to {0, 1, interior}; on each, the interior values
// are raw + tau with tau fixed by the mass constraint. Keeps the feasible assignment of
// least weighted distance.
std::vector<double> brute_force_projection(const std::vector<double> &raw,
                                           const std::vector<double> &m, double gamma)
{
  const std::size_t n = raw.size();
  std::size_t count = 1;
  for (std::size_t i = 0; i < n; ++i) count *= 3;
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> best_chi;
  for (std::size_t code = 0; code < count; ++code)
  {
    std::vector<int> state(n);
    std::size_t c = code;
    double fixed = 0.0, interior_mass = 0.0, interior_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
    {
      state[i] = static_cast<int>(c % 3);
      c /= 3;
      if (state[i] == 1) fixed += m[i];
      if (state[i] == 2)
      {
        interior_mass += m[i];
        interior_sum += m[i] * raw[i];
      }
    }
    std::vector<double> chi(n);
    double tau = 0.0;
    if (interior_mass > 0.0)
    {
      tau = (gamma - fixed - interior_sum) / interior_mass;
    }
    else if (std::abs(fixed - gamma) > 1e-12)
    {
      continue;
    }
    bool ok = true;
    double dist = 0.0;
    for (std::size_t i = 0; i < n && ok; ++i)
    {
      chi[i] = state[i] == 0 ? 0.0 : state[i] == 1 ? 1.0 : raw[i] + tau;
      ok = chi[i] >= -1e-14 && chi[i] <= 1.0 + 1e-14;
      dist += m[i] * (chi[i] - raw[i]) * (chi[i] - raw[i]);
    }
    if (ok && dist < best)
    {
      best = dist;
      best_chi = chi;
    }
  }
  return best_chi;
}

TEST(Projection, MatchesBruteForceQuadraticProgram)
{
  std::mt19937_64 rng(31);
  std::normal_distribution<double> g(0.4, 0.8);
  std::uniform_real_distribution<double> frac(0.05, 0.95);
  for (int trial = 0; trial < 200; ++trial)
  {
    const std::size_t n = 2 + trial % 6;
    const auto m = random_weights(n, rng);
    std::vector<double> raw(n);
    for (double &v : raw) v = g(rng);
    const FeasibleSet set(m, frac(rng));
    const LinerDensity p = project(raw, set);
    const auto expected = brute_force_projection(raw, m, set.gamma());
    ASSERT_EQ(expected.size(), n);
    for (std::size_t i = 0; i < n; ++i)
    {
      EXPECT_NEAR(p.values[i], expected[i], 1e-10) << "trial " << trial;
    }
    EXPECT_TRUE(set.contains(p.values, 1e-12));
  }
}

TEST(Projection, IdempotentAndNonExpansive)
{
  std::mt19937_64 rng(32);
  std::normal_distribution<double> g(0.5, 1.0);
  for (int trial = 0; trial < 200; ++trial)
  {
    const std::size_t n = 3 + trial % 20;
    const FeasibleSet set(random_weights(n, rng), 0.35);
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i)
    {
      a[i] = g(rng);
      b[i] = g(rng);
    }
    const auto pa = project(a, set);
    const auto ppa = project(pa.values, set);
    EXPECT_LT(set.distance(pa.values, ppa.values), 1e-12);
    const auto pb = project(b, set);
    EXPECT_LE(set.distance(pa.values, pb.values), set.distance(a, b) + 1e-12);
  }
}

TEST(Projection, ConstantInputGivesUniformDensity)
{
  const std::vector<double> m(8, 0.125);
  const FeasibleSet set(m, 0.4);
  for (double c : {-3.0, 0.0, 0.4, 0.9, 5.0})
  {
    const auto p = project(std::vector<double>(8, c), set);
    for (double v : p.values) EXPECT_NEAR(v, 0.4, 1e-14);
  }
}

TEST(Projection, FixedFacetsKeepTheirValues)
{
  const std::vector<double> m(4, 0.25);
  const FeasibleSet set(m, 0.5, {1, 0, 1, 1});
  const auto p = project({0.9, 1.0, 0.1, -0.4}, set);
  EXPECT_EQ(p.values[1], 1.0);
  EXPECT_TRUE(set.contains(p.values, 1e-12));
  EXPECT_THROW(project({0.0, 1.5, 0.0, 0.0}, set), ValidationError);
  const FeasibleSet crowded(m, 0.1, {1, 0, 0, 1});
  EXPECT_THROW(project({0.0, 1.0, 1.0, 0.0}, crowded), ValidationError);
}

TEST(Projection, Errors)
{
  EXPECT_THROW(FeasibleSet({0.5, 0.5}, 0.0), ValidationError);
  EXPECT_THROW(FeasibleSet({0.5, 0.5}, 1.0), ValidationError);
  EXPECT_THROW(FeasibleSet({0.5, -0.5}, 0.3), ValidationError);
  const FeasibleSet set({0.5, 0.5}, 0.3);
  EXPECT_THROW(project({0.1}, set), ValidationError);
  EXPECT_THROW(project({0.1, std::nan("")}, set), ValidationError);
}

TEST(Threshold, BangBangWithOneFractionalFacet)
{
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial)
  {
    const std::size_t n = 3 + trial % 15;
    const FeasibleSet set(random_weights(n, rng), 0.1 + 0.8 * u(rng));
    std::vector<double> raw(n);
    for (double &v : raw) v = u(rng);
    const LinerDensity chi = project(raw, set);
    const LinerDensity t = threshold(chi, set);
    EXPECT_NEAR(set.mass(t.values), set.gamma(), 1e-12);
    int fractional = 0;
    for (double v : t.values)
    {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
      fractional += v > 0.0 && v < 1.0;
    }
    EXPECT_LE(fractional, 1);
    // Larger relaxed values are never rounded below smaller ones.
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (chi.values[i] > chi.values[j]) EXPECT_GE(t.values[i], t.values[j]);
  }
}

TEST(Threshold, TiesBrokenByIndex)
{
  const FeasibleSet set(std::vector<double>(4, 0.25), 0.5);
  const LinerDensity t = threshold({{0.5, 0.5, 0.5, 0.5}, 0.5}, set);
  EXPECT_EQ(t.values, (std::vector<double>{1.0, 1.0, 0.0, 0.0}));
  const LinerDensity bang = threshold({{0.0, 1.0, 0.0, 1.0}, 0.5}, set);
  EXPECT_EQ(bang.values, (std::vector<double>{0.0, 1.0, 0.0, 1.0}));
}

Problem inflow_problem(const Model &s, Complex g = 1.0)
{
  Problem p;
  p.ops = &s.ops;
  p.derived = derive(testing::reference_physics());
  p.beta_v = Complex(0.5, 0.5);
  p.sources = SourceData::zero(s.mesh.num_nodes());
  p.sources.g.setConstant(g);
  return p;
}

TEST(Gradient, MatchesCentralDifferences)
{
  const Model s(testing::small_spec());
  const Problem problem = inflow_problem(s);
  const EnergySpec spec{1.0, 0.5, 0.3};
  const RealSparse gram = energy_gram(spec, s.ops);
  std::mt19937_64 rng(34);
  auto values = testing::random_chi(s.ops.num_lateral(), rng);
  for (double &v : values) v = 0.1 + 0.8 * v;
  const LinerDensity chi{values, 0.0};
  const Evaluation ev = evaluate(problem, gram, chi, 1.0, true);
  const double h = 1e-5;
  double scale = 0.0;
  for (double g : ev.gradient) scale = std::max(scale, std::abs(g));
  for (std::size_t e = 0; e < values.size(); ++e)
  {
    LinerDensity plus = chi, minus = chi;
    plus.values[e] += h;
    minus.values[e] -= h;
    const double fd = (evaluate(problem, gram, plus, 1.0, false).J -
                       evaluate(problem, gram, minus, 1.0, false).J) /
                      (2.0 * h);
    EXPECT_LT(std::abs(fd - ev.gradient[e]), 1e-4 * std::max(std::abs(fd), 1e-3 * scale))
        << "facet " << e;
  }
}

TEST(Gradient, WallDerivativeIsExactForFrozenFields)
{
  const Model s(testing::small_spec());
  const DerivedParams d = derive(testing::reference_physics());
  std::mt19937_64 rng(35);
  const auto chi = testing::random_chi(s.ops.num_lateral(), rng);
  auto shifted = chi;
  std::uniform_real_distribution<double> u(-0.05, 0.05);
  std::vector<double> delta(chi.size());
  for (std::size_t e = 0; e < chi.size(); ++e)
  {
    delta[e] = u(rng);
    shifted[e] = std::clamp(chi[e] + delta[e], 0.0, 1.0);
    delta[e] = shifted[e] - chi[e];
  }
  const auto src = SourceData::zero(s.mesh.num_nodes());
  const AssembledSystem a = assemble(s.ops, d, Complex(0.5, 0.5), {chi, 0.0}, src);
  const AssembledSystem b = assemble(s.ops, d, Complex(0.5, 0.5), {shifted, 0.0}, src);
  const auto p = testing::random_vector(s.mesh.num_nodes(), rng);
  const auto q = testing::random_vector(s.mesh.num_nodes(), rng);
  const auto dA = wall_derivative(a, p, q);
  Complex predicted = 0.0;
  for (std::size_t e = 0; e < dA.size(); ++e) predicted += delta[e] * dA[e];
  const Complex actual = apply_form(b, p, q) - apply_form(a, p, q);
  EXPECT_LT(std::abs(actual - predicted), 1e-12 * std::abs(apply_form(a, p, q)));
}

TEST(Gradient, ScalesQuadraticallyWithData)
{
  const Model s(testing::small_spec());
  const EnergySpec spec{1.0, 0.0, 0.0};
  const RealSparse gram = energy_gram(spec, s.ops);
  const LinerDensity chi = uniform_density(s.ops, 0.4);
  const Complex scale(1.5, -2.0);
  const Evaluation a = evaluate(inflow_problem(s), gram, chi, 1.0, true);
  const Evaluation b = evaluate(inflow_problem(s, scale), gram, chi, 1.0, true);
  const double s2 = std::norm(scale);
  EXPECT_NEAR(b.J, s2 * a.J, 1e-12 * b.J);
  for (std::size_t e = 0; e < a.gradient.size(); ++e)
  {
    EXPECT_NEAR(b.gradient[e], s2 * a.gradient[e], 1e-10 * std::abs(b.J));
  }
}

TEST(Minimize, MonotoneAndFeasible)
{
  const Model s(testing::small_spec());
  const Problem problem = inflow_problem(s);
  const FeasibleSet set = FeasibleSet::of(s.ops, 0.4);
  OptimizeOptions options;
  options.energy = EnergySpec{1.0, 0.0, 0.0};
  options.max_iters = 15;
  const OptimizeReport report = minimize(problem, set, uniform_density(s.ops, 0.4), options);
  ASSERT_GE(report.iterates.size(), 2u);
  for (std::size_t i = 1; i < report.iterates.size(); ++i)
  {
    EXPECT_LE(report.iterates[i].J, report.iterates[i - 1].J);
    EXPECT_LE(report.iterates[i].mass_error, 1e-12);
  }
  EXPECT_TRUE(set.contains(report.chi, 1e-12));
  EXPECT_TRUE(set.contains(report.chi_threshold, 1e-12));
  EXPECT_LE(report.J_relaxed, report.iterates.front().J);
  EXPECT_FALSE(report.stop_reason.empty());

  const auto json = nlohmann::json::parse(to_json(report));
  EXPECT_EQ(json["iterates"].size(), report.iterates.size());
  EXPECT_EQ(json["stop_reason"], report.stop_reason);
  EXPECT_DOUBLE_EQ(json["J_relaxed"].get<double>(), report.J_relaxed);
}

TEST(Minimize, DegenerateBandMatchesSingleMode)
{
  const Model s(testing::small_spec());
  const Problem problem = inflow_problem(s);
  const FeasibleSet set = FeasibleSet::of(s.ops, 0.4);
  OptimizeOptions single;
  single.k0 = 1.0;
  single.max_iters = 3;
  OptimizeOptions band = single;
  band.mode = Mode::Band;
  band.energy.k_min = band.energy.k_max = 1.0;
  const auto a = minimize(problem, set, uniform_density(s.ops, 0.4), single);
  const auto b = minimize(problem, set, uniform_density(s.ops, 0.4), band);
  EXPECT_EQ(a.chi, b.chi);
  EXPECT_DOUBLE_EQ(a.J_relaxed, b.J_relaxed);
}

TEST(Minimize, WeightedQuadraticConvergesToProjectedTarget)
{
  // J = sum m (chi - t)^2 is minimized over the feasible set by the projection of t.
  std::mt19937_64 rng(36);
  const auto m = random_weights(10, rng);
  const FeasibleSet set(m, 0.45);
  std::normal_distribution<double> g(0.5, 0.6);
  std::vector<double> target(m.size());
  for (double &t : target) t = g(rng);
  const auto fn = [&](const LinerDensity &chi, bool with_gradient) {
    Evaluation ev;
    for (std::size_t i = 0; i < m.size(); ++i)
    {
      ev.J += m[i] * (chi.values[i] - target[i]) * (chi.values[i] - target[i]);
      if (with_gradient) ev.gradient.push_back(2.0 * m[i] * (chi.values[i] - target[i]));
    }
    return ev;
  };
  OptimizeOptions options;
  options.tol = 1e-12;
  options.max_iters = 200;
  const OptimizeReport report =
      minimize(fn, set, LinerDensity{std::vector<double>(m.size(), 0.45), 0.45}, options);
  const LinerDensity expected = project(target, set);
  EXPECT_LT(set.distance(report.chi, expected.values), 1e-9);
  EXPECT_TRUE(report.converged) << report.stop_reason;
}

TEST(Minimize, Errors)
{
  const Model s(testing::small_spec());
  const Problem problem = inflow_problem(s);
  OptimizeOptions options;
  options.k0 = -1.0;
  EXPECT_THROW(minimize(problem, FeasibleSet::of(s.ops, 0.4), uniform_density(s.ops, 0.4), options),
               ValidationError);
  options.k0 = 1.0;
  EXPECT_THROW(minimize(problem, FeasibleSet({1.0}, 0.4), uniform_density(s.ops, 0.4), options),
               ValidationError);
}

}  // namespace
}  // namespace liner
