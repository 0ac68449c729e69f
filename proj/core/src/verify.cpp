// SPDX-License-Identifier: Apache-2.0

#include "liner/verify.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <limits>
#include <numeric>
#include <random>

#include "liner/admissibility.hpp"
#include "liner/energy.hpp"
#include "liner/error.hpp"
#include "liner/optimize.hpp"
#include "liner/parallel.hpp"
#include "liner/solver.hpp"

namespace liner::verify
{

namespace
{

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string format(const char *fmt, ...)
{
  char buffer[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buffer, sizeof buffer, fmt, args);
  va_end(args);
  return buffer;
}

// Reference flow: M0 = 0.2, k0 = 1, Z = 2 - 2i, beta_v = 0.5 + 0.5i (admissible for r = 1).
PhysicalParams reference_physics()
{
  PhysicalParams p;
  p.omega = 340.0;
  p.c0 = 340.0;
  p.u0 = 68.0;
  p.Z = Complex(2.0, -2.0);
  p.beta_v = Complex(0.5, 0.5);
  return p;
}

MeshSpec duct(double L, double R, int n_axial, int n_ring, int refinement = 0)
{
  MeshSpec s;
  s.L = L;
  s.R = R;
  s.n_axial = n_axial;
  s.n_ring = n_ring;
  s.refinement_level = refinement;
  return s;
}

struct Model
{
  CylinderMesh mesh;
  BoundaryMeasure measure;
  FormOperators ops;

  explicit Model(const MeshSpec &spec)
      : mesh(generate(spec)), measure(build_measure(mesh, 1.0)), ops(mesh, measure)
  {
  }
};

Vec3 centroid(const CylinderMesh &mesh, int facet)
{
  Vec3 c = Vec3::Zero();
  for (int n : mesh.facets()[facet].nodes)
  {
    c += mesh.nodes()[n];
  }
  return c / 3.0;
}

// Smooth volume source and wall source sampled at the nodes.
Eigen::VectorXcd smooth_source(const CylinderMesh &mesh, double a, double b)
{
  Eigen::VectorXcd v(static_cast<Eigen::Index>(mesh.num_nodes()));
  for (std::size_t i = 0; i < mesh.num_nodes(); ++i)
  {
    const Vec3 &x = mesh.nodes()[i];
    v[static_cast<Eigen::Index>(i)] =
        Complex(std::cos(a * x.x()) + x.y(), std::sin(b * x.x()) * (1.0 + x.z()));
  }
  return v;
}

Problem inflow_problem(const FormOperators &ops)
{
  Problem p;
  p.ops = &ops;
  p.derived = derive(reference_physics());
  p.beta_v = reference_physics().beta_v;
  p.sources = SourceData::zero(ops.num_nodes());
  p.sources.g.setConstant(1.0);
  return p;
}

// ---------------------------------------------------------------------------------------

CheckResult operator_decomposition(Level)
{
  const auto start = Clock::now();
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> ratio(-50.0, 50.0);
  std::uniform_real_distribution<double> k0s(0.1, 20.0);
  std::uniform_real_distribution<double> mach(0.01, 0.95);
  int draws = 0, failures = 0;
  double worst = 0.0;
  while (draws < 1000)
  {
    const Complex beta(unit(rng), unit(rng));
    const double r = ratio(rng);
    if (std::abs(beta) >= 0.999 || !is_admissible({beta, r}))
    {
      continue;
    }
    DerivedParams d;
    d.k0 = k0s(rng);
    d.M0 = mach(rng);
    d.k = d.k0 / d.M0;
    d.Y = Complex(1.0, r);
    d.r = r;
    const MyersCoefficients c = myers_coeffs(d, beta);
    const SymbolPolynomial lhs = operator_symbol(beta, d.k0, d.M0);
    const SymbolPolynomial rhs = factorized_symbol(c);
    const auto rel = [](Complex a, Complex b) {
      return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
    };
    worst = std::max({worst, rel(lhs.c0, rhs.c0), rel(lhs.c1, rhs.c1), rel(lhs.c2, rhs.c2),
                      rel(c.K2, K2_expanded(beta, d.k0))});
    failures += verify_decomposition(c, d) ? 0 : 1;
    ++draws;
  }
  const double t = seconds_since(start);
  CheckResult res;
  res.passed = failures == 0 && worst <= 1e-12 && t < 1.0;
  res.detail = format("%d admissible draws, %d mismatches, worst relative coefficient error %.2e, "
                      "%.3f s (limit 1e-12, 1 s)",
                      draws, failures, worst, t);
  return res;
}

CheckResult admissible_zones(Level level)
{
  const auto start = Clock::now();
  const int n = level == Level::Full ? 512 : 128;
  bool symmetric = true;
  for (double r : {1.0, 50.0})
  {
    const ZoneRaster plus = rasterize_zone(r, n);
    const ZoneRaster minus = rasterize_zone(-r, n);
    for (int j = 0; j < n && symmetric; ++j)
      for (int i = 0; i < n && symmetric; ++i)
        symmetric = plus.at(i, j) == minus.at(i, n - 1 - j);
  }

  // Real segment: beta_v = x in (-1, 1) \ {0} is never admissible.
  int real_members = 0;
  for (double r : {1.0, -1.0, 50.0, -50.0})
  {
    for (int i = 1; i < 2000; ++i)
    {
      const double x = -1.0 + i / 1000.0;
      if (x != 0.0 && is_admissible({Complex(x, 0.0), r}))
      {
        ++real_members;
      }
    }
  }

  double worst_agreement = 1.0;
  for (auto [r, limit] : {std::pair{1e6, RatioLimit::PlusInfinity},
                          std::pair{-1e6, RatioLimit::MinusInfinity}})
  {
    const ZoneRaster finite = rasterize_zone(r, n);
    const ZoneRaster lim = rasterize_zone(limit, n);
    std::size_t inside = 0, agree = 0;
    for (int j = 0; j < n; ++j)
    {
      const double y = ZoneRaster::center(j, n);
      for (int i = 0; i < n; ++i)
      {
        const double x = ZoneRaster::center(i, n);
        if (x * x + y * y >= 1.0)
        {
          continue;
        }
        ++inside;
        agree += finite.at(i, j) == lim.at(i, j) ? 1 : 0;
      }
    }
    worst_agreement = std::min(worst_agreement, static_cast<double>(agree) / inside);
  }
  const double t = seconds_since(start);
  CheckResult res;
  res.passed = symmetric && real_members == 0 && worst_agreement >= 0.98 && t < 10.0;
  res.detail = format("n = %d: conjugate symmetry %s, %d admissible real points, limit-set "
                      "agreement at r = +-1e6 %.4f (need 0.98), %.2f s",
                      n, symmetric ? "exact" : "BROKEN", real_members, worst_agreement, t);
  return res;
}

CheckResult manufactured_convergence(Level level)
{
  const auto start = Clock::now();
  StudyCase study;
  study.derived = derive(reference_physics());
  study.beta_v = reference_physics().beta_v;
  study.chi = [](const Vec3 &x) {
    return 0.5 + 0.4 * std::sin(1.3 * x.x()) * std::cos(std::atan2(x.z(), x.y()));
  };
  study.exact = ExactField::smooth();
  std::vector<MeshSpec> ladder;
  for (int l = 0; l < 3; ++l)
  {
    ladder.push_back(level == Level::Full ? duct(4.0, 1.0, 17, 4, l) : duct(2.0, 0.5, 5, 2, l));
  }
  const StudyResult r = convergence_study(ladder, study);
  const double t = seconds_since(start);
  std::string nodes;
  for (const auto &row : r.rows)
  {
    nodes += format("%s%zu (L2 %.3e)", nodes.empty() ? "" : ", ", row.nodes, row.errors.l2);
  }
  CheckResult res;
  res.passed = r.l2_order >= 1.8 && r.h1_order >= 0.9 && t < 300.0;
  res.detail = format("nodes %s; L2 order %.3f (need 1.8), H1 order %.3f (need 0.9), V order "
                      "%.3f, %.1f s",
                      nodes.c_str(), r.l2_order, r.h1_order, r.v_order, t);
  return res;
}

CheckResult uniqueness_and_stability(Level level)
{
  const auto start = Clock::now();
  const DerivedParams d = derive(reference_physics());
  const Complex beta = reference_physics().beta_v;

  const Model base(duct(2.0, 0.5, 5, 2));
  const auto n = base.mesh.num_nodes();
  const LinerDensity chi = uniform_density(base.ops, 0.6);
  const double zero_norm =
      solve(assemble(base.ops, d, beta, chi, SourceData::zero(n))).values.norm();

  std::mt19937_64 rng(404);
  std::normal_distribution<double> g;
  const auto random = [&]() {
    Eigen::VectorXcd v(static_cast<Eigen::Index>(n));
    for (auto &x : v) x = Complex(g(rng), g(rng));
    return v;
  };
  SourceData a = SourceData::zero(n), b = SourceData::zero(n);
  a.f = random();
  a.g = random();
  b.eta = random();
  b.psi = random();
  SourceData sum = a;
  sum.eta = b.eta;
  sum.psi = b.psi;
  const auto ua = solve(assemble(base.ops, d, beta, chi, a)).values;
  const auto ub = solve(assemble(base.ops, d, beta, chi, b)).values;
  const auto us = solve(assemble(base.ops, d, beta, chi, sum)).values;
  const double superposition = (us - ua - ub).norm() / us.norm();

  // ||u||_V / (||f|| + ||eta||) for fixed smooth data on a refinement ladder.
  const int levels = level == Level::Full ? 3 : 2;
  std::vector<double> ratios;
  for (int l = 0; l < levels; ++l)
  {
    const Model m(duct(2.0, 0.5, 5, 2, l));
    SourceData src = SourceData::zero(m.mesh.num_nodes());
    src.f = smooth_source(m.mesh, 1.1, 0.7);
    src.eta = smooth_source(m.mesh, 0.4, 1.9);
    const AssembledSystem sys = assemble(m.ops, d, beta, uniform_density(m.ops, 0.6), src);
    const double data = std::sqrt(quadratic(m.ops.mass(), src.f, src.f).real()) +
                        std::sqrt(quadratic(m.ops.lateral_mass(), src.eta, src.eta).real());
    ratios.push_back(v_norm(sys, solve(sys).values) / data);
  }
  const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
  const double spread = *hi / *lo;
  std::string listed;
  for (double r : ratios) listed += format("%s%.4g", listed.empty() ? "" : ", ", r);

  CheckResult res;
  res.passed = zero_norm < 1e-9 && superposition <= 1e-10 && spread < 2.0;
  res.detail = format("zero-data norm %.1e (need 1e-9), superposition error %.1e (need 1e-10), "
                      "stability ratios [%s] spread x%.3f (need < 2), %.2f s",
                      zero_norm, superposition, listed.c_str(), spread, seconds_since(start));
  return res;
}

CheckResult gradient_check(Level level)
{
  const auto start = Clock::now();
  const Model m(level == Level::Full ? duct(1.0, 0.5, 5, 2) : duct(1.0, 0.5, 3, 1));
  Problem problem = inflow_problem(m.ops);
  problem.sources.f = smooth_source(m.mesh, 1.0, 2.0);
  const EnergySpec spec{1.0, 0.5, 0.5};
  const RealSparse gram = energy_gram(spec, m.ops);
  std::mt19937_64 rng(505);
  std::uniform_real_distribution<double> u(0.1, 0.9);
  LinerDensity chi{std::vector<double>(m.ops.num_lateral()), 0.0};
  for (double &v : chi.values) v = u(rng);
  const double k0 = problem.derived.k0;
  const Evaluation ev = evaluate(problem, gram, chi, k0, true);

  const double h = 1e-5;
  std::vector<double> fd(chi.values.size());
  parallel_for(chi.values.size(), [&](std::size_t e) {
    LinerDensity plus = chi, minus = chi;
    plus.values[e] += h;
    minus.values[e] -= h;
    fd[e] = (evaluate(problem, gram, plus, k0, false).J -
             evaluate(problem, gram, minus, k0, false).J) /
            (2.0 * h);
  });
  double worst = 0.0;
  std::size_t worst_facet = 0;
  for (std::size_t e = 0; e < fd.size(); ++e)
  {
    const double rel = std::abs(fd[e] - ev.gradient[e]) / std::abs(fd[e]);
    if (!(rel <= worst))
    {
      worst = rel;
      worst_facet = e;
    }
  }
  const double t = seconds_since(start);
  CheckResult res;
  res.passed = m.ops.num_lateral() <= 200 && worst < 1e-4 && t < 120.0;
  res.detail = format("%zu lateral facets, worst per-component relative error %.2e at facet %zu "
                      "(adjoint %.6e, central difference %.6e; need 1e-4), %.2f s",
                      m.ops.num_lateral(), worst, worst_facet, ev.gradient[worst_facet],
                      fd[worst_facet], t);
  return res;
}

// Least weighted distance over every assignment of facets to {0, 1, interior}.
std::vector<double> brute_force_projection(const std::vector<double> &raw,
                                           const std::vector<double> &m, double gamma)
{
  const std::size_t n = raw.size();
  std::size_t count = 1;
  for (std::size_t i = 0; i < n; ++i) count *= 3;
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> best_chi, chi(n);
  std::vector<int> state(n);
  for (std::size_t code = 0; code < count; ++code)
  {
    std::size_t c = code;
    double ones = 0.0, interior_mass = 0.0, interior_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
    {
      state[i] = static_cast<int>(c % 3);
      c /= 3;
      if (state[i] == 1) ones += m[i];
      if (state[i] == 2)
      {
        interior_mass += m[i];
        interior_sum += m[i] * raw[i];
      }
    }
    double tau = 0.0;
    if (interior_mass > 0.0)
    {
      tau = (gamma - ones - interior_sum) / interior_mass;
    }
    else if (std::abs(ones - gamma) > 1e-12)
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

CheckResult projection_oracle(Level level)
{
  const auto start = Clock::now();
  std::mt19937_64 rng(606);
  std::uniform_real_distribution<double> w(0.2, 2.0), frac(0.05, 0.95);
  std::normal_distribution<double> g(0.5, 0.9);
  const auto weights = [&](std::size_t n) {
    std::vector<double> m(n);
    for (double &x : m) x = w(rng);
    const double total = std::accumulate(m.begin(), m.end(), 0.0);
    for (double &x : m) x /= total;
    return m;
  };

  const int draws = level == Level::Full ? 100 : 10;
  double worst_qp = 0.0;
  for (int trial = 0; trial < draws; ++trial)
  {
    const auto m = weights(12);
    std::vector<double> raw(12);
    for (double &v : raw) v = g(rng);
    const FeasibleSet set(m, frac(rng));
    const auto p = project(raw, set).values;
    const auto expected = brute_force_projection(raw, m, set.gamma());
    for (std::size_t i = 0; i < raw.size(); ++i)
    {
      worst_qp = std::max(worst_qp, std::abs(p[i] - expected[i]));
    }
  }

  double worst_idem = 0.0, worst_expansion = -std::numeric_limits<double>::infinity();
  for (int pair = 0; pair < 1000; ++pair)
  {
    const std::size_t n = 2 + pair % 40;
    const FeasibleSet set(weights(n), frac(rng));
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i)
    {
      a[i] = g(rng);
      b[i] = g(rng);
    }
    const auto pa = project(a, set).values;
    const auto pb = project(b, set).values;
    worst_idem = std::max(worst_idem, set.distance(project(pa, set).values, pa));
    worst_expansion = std::max(worst_expansion, set.distance(pa, pb) - set.distance(a, b));
  }
  CheckResult res;
  res.passed = worst_qp <= 1e-9 && worst_idem <= 1e-12 && worst_expansion <= 1e-12;
  res.detail = format("%d 12-facet QP draws: worst deviation %.1e (need 1e-9); 1000 pairs: "
                      "idempotence %.1e, worst |Pa-Pb| - |a-b| = %.1e; %.2f s",
                      draws, worst_qp, worst_idem, worst_expansion, seconds_since(start));
  return res;
}

bool monotone_and_feasible(const OptimizeReport &r, double *worst_mass)
{
  bool ok = true;
  for (std::size_t i = 0; i < r.iterates.size(); ++i)
  {
    *worst_mass = std::max(*worst_mass, r.iterates[i].mass_error);
    ok = ok && r.iterates[i].mass_error <= 1e-12;
    if (i > 0)
    {
      ok = ok && r.iterates[i].J <= r.iterates[i - 1].J;
    }
  }
  return ok;
}

CheckResult optimizer_behavior(Level level)
{
  const auto start = Clock::now();
  const Model m(duct(1.0, 0.5, 3, level == Level::Full ? 2 : 1));
  const Problem problem = inflow_problem(m.ops);
  OptimizeOptions options;
  options.k0 = problem.derived.k0;
  options.energy = EnergySpec{1.0, 0.0, 0.0};
  options.tol = 1e-10;
  options.max_iters = 200;
  const RealSparse gram = energy_gram(options.energy, m.ops);

  // Full facet-wise problem.
  const FeasibleSet set = FeasibleSet::of(m.ops, 0.4);
  const OptimizeReport full =
      minimize(problem, set, uniform_density(m.ops, 0.4), [&] {
        OptimizeOptions o = options;
        o.max_iters = level == Level::Full ? 40 : 10;
        return o;
      }());
  double worst_mass = 0.0;
  bool ok = monotone_and_feasible(full, &worst_mass);

  // Reduced toy: one density value per axial half of the wall.
  std::vector<int> group(m.ops.num_lateral());
  std::array<double, 2> gm{0.0, 0.0};
  for (std::size_t e = 0; e < group.size(); ++e)
  {
    group[e] = centroid(m.mesh, m.ops.lateral()[e].facet).x() < 0.5 * m.mesh.spec().L ? 0 : 1;
    gm[group[e]] += m.ops.lateral()[e].mass;
  }
  const double gamma = 0.4;
  const FeasibleSet toy_set({gm[0], gm[1]}, gamma);
  const auto expand = [&](const std::vector<double> &c) {
    LinerDensity chi{std::vector<double>(group.size()), gamma};
    for (std::size_t e = 0; e < group.size(); ++e) chi.values[e] = c[group[e]];
    return chi;
  };
  const auto toy = [&](const LinerDensity &c, bool with_gradient) {
    Evaluation ev = evaluate(problem, gram, expand(c.values), options.k0, with_gradient);
    if (with_gradient)
    {
      std::vector<double> g(2, 0.0);
      for (std::size_t e = 0; e < group.size(); ++e) g[group[e]] += ev.gradient[e];
      ev.gradient = g;
    }
    return ev;
  };
  const OptimizeReport reduced =
      minimize(toy, toy_set, LinerDensity{{gamma, gamma}, gamma}, options);
  ok = monotone_and_feasible(reduced, &worst_mass) && ok;

  // Grid search along the feasible segment c1 in [lo, hi], then golden-section refinement.
  const double lo = std::max(0.0, (gamma - gm[1]) / gm[0]);
  const double hi = std::min(1.0, gamma / gm[0]);
  const auto along = [&](double c1) {
    const std::vector<double> c{c1, (gamma - gm[0] * c1) / gm[1]};
    return toy(LinerDensity{c, gamma}, false).J;
  };
  const int grid = level == Level::Full ? 2001 : 201;
  double best_c1 = lo, best_J = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid; ++i)
  {
    const double c1 = lo + (hi - lo) * i / (grid - 1);
    const double J = along(c1);
    if (J < best_J)
    {
      best_J = J;
      best_c1 = c1;
    }
  }
  double a = std::max(lo, best_c1 - (hi - lo) / (grid - 1));
  double b = std::min(hi, best_c1 + (hi - lo) / (grid - 1));
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  while (b - a > 1e-9)
  {
    const double c = b - phi * (b - a), d = a + phi * (b - a);
    if (along(c) < along(d))
    {
      b = d;
    }
    else
    {
      a = c;
    }
  }
  const double c1_star = 0.5 * (a + b);
  const double c2_star = (gamma - gm[0] * c1_star) / gm[1];
  const double gap = std::max(std::abs(reduced.chi[0] - c1_star),
                              std::abs(reduced.chi[1] - c2_star));
  ok = ok && gap <= 1e-3;

  CheckResult res;
  res.passed = ok;
  res.detail = format("facet problem: %zu iterates, J %.6e -> %.6e; toy: optimizer (%.6f, %.6f) "
                      "vs grid (%.6f, %.6f), gap %.1e (need 1e-3), stop '%s'; worst mass error "
                      "%.1e; %.2f s",
                      full.iterates.size(), full.iterates.front().J, full.J_relaxed,
                      reduced.chi[0], reduced.chi[1], c1_star, c2_star, gap,
                      reduced.stop_reason.c_str(), worst_mass, seconds_since(start));
  return res;
}

CheckResult weak_star_proxy(Level level)
{
  const auto start = Clock::now();
  const int finest = level == Level::Full ? 16 : 8;
  // Two axial cells per half stripe at the finest m.
  const Model m(duct(2.0, 0.5, 2 * finest + 1, 2));
  const Problem problem = inflow_problem(m.ops);
  const EnergySpec spec{1.0, 0.0, 0.0};
  const RealSparse gram = energy_gram(spec, m.ops);
  const double gamma = 0.5;
  const double k0 = problem.derived.k0;
  const double J_const = evaluate(problem, gram, uniform_density(m.ops, gamma), k0, false).J;

  std::vector<int> stripes;
  for (int s = 2; s <= finest; s *= 2) stripes.push_back(s);
  std::vector<double> gaps(stripes.size());
  parallel_for(stripes.size(), [&](std::size_t i) {
    LinerDensity chi{std::vector<double>(m.ops.num_lateral()), gamma};
    for (std::size_t e = 0; e < chi.values.size(); ++e)
    {
      const double x = centroid(m.mesh, m.ops.lateral()[e].facet).x() / m.mesh.spec().L;
      const double phase = x * stripes[i] - std::floor(x * stripes[i]);
      chi.values[e] = phase < gamma ? 1.0 : 0.0;
    }
    gaps[i] = std::abs(evaluate(problem, gram, chi, k0, false).J - J_const);
  });
  bool ok = true;
  std::string listed;
  for (std::size_t i = 0; i < gaps.size(); ++i)
  {
    listed += format("%sm=%d: %.4e", listed.empty() ? "" : ", ", stripes[i], gaps[i]);
    if (i > 0)
    {
      ok = ok && gaps[i] <= 1.1 * gaps[i - 1];
    }
  }
  ok = ok && gaps.back() < gaps.front();
  CheckResult res;
  res.passed = ok;
  res.detail = format("|J(stripes) - J(gamma)| %s (each <= 1.1x the previous); %zu lateral "
                      "facets, %.2f s",
                      listed.c_str(), m.ops.num_lateral(), seconds_since(start));
  return res;
}

CheckResult upper_regularity(Level level)
{
  const auto start = Clock::now();
  const CylinderMesh mesh = generate(duct(2.0, 0.5, 9, 2));
  const double d_cantor = CantorComponent::limit_dimension();
  const int samples = level == Level::Full ? 400 : 150;

  const auto cantor = [&](int lvl) {
    CantorComponent c;
    c.level = lvl;
    c.mass = 1.0;
    return build_measure(mesh, 0.0, c);
  };

  std::vector<BoundaryMeasure> measures;
  for (int lvl = 3; lvl <= 6; ++lvl) measures.push_back(cantor(lvl));
  measures.push_back(build_measure(mesh, 1.0));
  {
    CantorComponent c;
    c.level = 6;
    c.mass = 0.5;
    measures.push_back(build_measure(mesh, 1.0, c));
  }
  const BoundaryMeasure &level6 = measures[3];

  const double a1 = estimate_upper_regularity(level6, d_cantor, samples, 1).A_hat;
  const double a2 = estimate_upper_regularity(level6, d_cantor, 2 * samples, 2).A_hat;
  const double stability = a2 / a1;
  bool ok = std::abs(stability - 1.0) <= 0.25;

  std::vector<double> trend;
  for (int i = 0; i < 4; ++i)
  {
    trend.push_back(estimate_upper_regularity(measures[i], 1.9, samples, 3).A_hat);
  }
  bool diverging = true;
  for (std::size_t i = 1; i < trend.size(); ++i) diverging = diverging && trend[i] > trend[i - 1];
  diverging = diverging && trend.back() / trend.front() >= 1.5;
  ok = ok && diverging;

  // A_hat is nondecreasing in d for the same samples, on every measure built here.
  bool monotone = true;
  const std::vector<double> ds{1.1, d_cantor, 1.9, 2.0};
  for (const auto &mu : measures)
  {
    double previous = 0.0;
    for (double d : ds)
    {
      const double A = estimate_upper_regularity(mu, d, std::max(100, samples / 2), 4).A_hat;
      monotone = monotone && std::isfinite(A) && A >= previous;
      previous = A;
    }
  }
  ok = ok && monotone;

  CheckResult res;
  res.passed = ok;
  res.detail = format("level 6 at d = %.4f: A_hat %.4g (%d samples) vs %.4g (%d samples), "
                      "ratio %.3f (need within 25%%); d = 1.9 over levels 3..6: %.3g, %.3g, "
                      "%.3g, %.3g (%s); monotone in d on %zu measures: %s; %.2f s",
                      d_cantor, a1, samples, a2, 2 * samples, stability, trend[0], trend[1],
                      trend[2], trend[3], diverging ? "diverging" : "NOT diverging",
                      measures.size(), monotone ? "yes" : "NO", seconds_since(start));
  return res;
}

Check named(int id, const char *name, CheckResult (*fn)(Level))
{
  return [=](Level level) {
    const auto start = Clock::now();
    CheckResult r;
    try
    {
      r = fn(level);
    }
    catch (const std::exception &e)
    {
      r.passed = false;
      r.detail = std::string("error: ") + e.what();
    }
    r.id = id;
    r.name = name;
    r.seconds = seconds_since(start);
    return r;
  };
}

}  // namespace

std::vector<Check> suites()
{
  return {
      named(1, "operator decomposition", operator_decomposition),
      named(2, "admissible zones", admissible_zones),
      named(3, "manufactured-solution convergence", manufactured_convergence),
      named(4, "uniqueness, linearity and stability", uniqueness_and_stability),
      named(5, "adjoint gradient vs finite differences", gradient_check),
      named(6, "projection oracle", projection_oracle),
      named(7, "optimizer descent and reduced toy", optimizer_behavior),
      named(8, "striped density weak-* proxy", weak_star_proxy),
      named(9, "upper regularity of the Cantor measure", upper_regularity),
  };
}

std::vector<CheckResult> run_all(Level level,
                                 const std::function<void(const CheckResult &)> &on_result)
{
  std::vector<CheckResult> out;
  for (const auto &check : suites())
  {
    out.push_back(check(level));
    if (on_result)
    {
      on_result(out.back());
    }
  }
  return out;
}

}  // namespace liner::verify
