// SPDX-License-Identifier: Apache-2.0

#include "liner/optimize.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "liner/error.hpp"
#include "liner/parallel.hpp"

namespace liner
{

FeasibleSet::FeasibleSet(std::vector<double> weights, double gamma,
                         std::vector<std::uint8_t> free)
    : weights_(std::move(weights)), gamma_(gamma), free_(std::move(free))
{
  require(std::isfinite(gamma) && gamma > 0.0 && gamma < 1.0,
          "volume fraction gamma must lie strictly between 0 and 1");
  require(!weights_.empty(), "feasible set needs at least one facet");
  for (double m : weights_)
  {
    require(std::isfinite(m) && m >= 0.0, "facet measure weights must be >= 0");
  }
  if (free_.empty())
  {
    free_.assign(weights_.size(), 1);
  }
  require(free_.size() == weights_.size(), "facet mask size does not match the facet count");
}

FeasibleSet FeasibleSet::of(const FormOperators &ops, double gamma, std::vector<std::uint8_t> free)
{
  std::vector<double> weights;
  weights.reserve(ops.num_lateral());
  for (const auto &fm : ops.lateral())
  {
    weights.push_back(fm.mass);
  }
  return FeasibleSet(std::move(weights), gamma, std::move(free));
}

double FeasibleSet::mass(const std::vector<double> &chi) const
{
  require(chi.size() == weights_.size(), "chi size does not match the feasible set");
  double m = 0.0;
  for (std::size_t i = 0; i < chi.size(); ++i)
  {
    m += weights_[i] * chi[i];
  }
  return m;
}

bool FeasibleSet::contains(const std::vector<double> &chi, double mass_tol) const
{
  if (chi.size() != weights_.size())
  {
    return false;
  }
  for (double v : chi)
  {
    if (!(v >= 0.0 && v <= 1.0))
    {
      return false;
    }
  }
  return std::abs(mass(chi) - gamma_) <= mass_tol;
}

double FeasibleSet::distance(const std::vector<double> &a, const std::vector<double> &b) const
{
  require(a.size() == weights_.size() && b.size() == weights_.size(),
          "distance expects vectors of the facet count");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
  {
    s += weights_[i] * (a[i] - b[i]) * (a[i] - b[i]);
  }
  return std::sqrt(s);
}

LinerDensity project(const std::vector<double> &raw, const FeasibleSet &set)
{
  require(raw.size() == set.size(), "chi size does not match the feasible set");
  for (double v : raw)
  {
    require(std::isfinite(v), "chi values must be finite");
  }
  if (set.contains(raw))
  {
    return {raw, set.gamma()};
  }

  const auto &m = set.weights();
  double target = set.gamma();
  double free_total = 0.0;
  bool any_free = false;
  for (std::size_t i = 0; i < raw.size(); ++i)
  {
    if (set.is_free(i))
    {
      free_total += m[i];
      any_free = true;
    }
    else
    {
      require(raw[i] >= 0.0 && raw[i] <= 1.0, "fixed facets must hold values in [0, 1]");
      target -= m[i] * raw[i];
    }
  }
  // Shifts at which every free facet clamps to 0, respectively to 1.
  double lo = 0.0, hi = 0.0;
  for (std::size_t i = 0; i < raw.size(); ++i)
  {
    if (set.is_free(i))
    {
      lo = std::min(lo, -raw[i]);
      hi = std::max(hi, 1.0 - raw[i]);
    }
  }
  require(any_free, "feasible set has no free facets");
  require(target >= -1e-12 && target <= free_total + 1e-12,
          "fixed facets leave no feasible mass for the free ones");

  const auto shifted_mass = [&](double tau) {
    double s = 0.0;
    for (std::size_t i = 0; i < raw.size(); ++i)
    {
      if (set.is_free(i))
      {
        s += m[i] * std::clamp(raw[i] + tau, 0.0, 1.0);
      }
    }
    return s;
  };

  for (int it = 0; it < 60; ++it)
  {
    const double mid = 0.5 * (lo + hi);
    if (shifted_mass(mid) < target)
    {
      lo = mid;
    }
    else
    {
      hi = mid;
    }
  }

  // Exact shift on the active set found by bisection, refined until it is self-consistent.
  double tau = 0.5 * (lo + hi);
  for (int pass = 0; pass < 8; ++pass)
  {
    double ones = 0.0, interior_mass = 0.0, interior_sum = 0.0;
    for (std::size_t i = 0; i < raw.size(); ++i)
    {
      if (!set.is_free(i))
      {
        continue;
      }
      const double v = raw[i] + tau;
      if (v >= 1.0)
      {
        ones += m[i];
      }
      else if (v > 0.0)
      {
        interior_mass += m[i];
        interior_sum += m[i] * raw[i];
      }
    }
    if (interior_mass <= 0.0)
    {
      break;
    }
    const double exact = (target - ones - interior_sum) / interior_mass;
    if (exact == tau)
    {
      break;
    }
    tau = exact;
  }

  LinerDensity out{raw, set.gamma()};
  for (std::size_t i = 0; i < raw.size(); ++i)
  {
    if (set.is_free(i))
    {
      out.values[i] = std::clamp(raw[i] + tau, 0.0, 1.0);
    }
  }
  return out;
}

LinerDensity threshold(const LinerDensity &chi, const FeasibleSet &set)
{
  require(chi.values.size() == set.size(), "chi size does not match the feasible set");
  const auto &m = set.weights();
  double target = set.gamma();
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < chi.values.size(); ++i)
  {
    if (set.is_free(i))
    {
      order.push_back(i);
    }
    else
    {
      target -= m[i] * chi.values[i];
    }
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return chi.values[a] > chi.values[b];
  });

  LinerDensity out{chi.values, set.gamma()};
  double filled = 0.0;
  bool fractional_done = false;
  for (std::size_t i : order)
  {
    if (fractional_done)
    {
      out.values[i] = 0.0;
    }
    else if (filled + m[i] <= target)
    {
      out.values[i] = 1.0;
      filled += m[i];
    }
    else
    {
      out.values[i] = m[i] > 0.0 ? std::clamp((target - filled) / m[i], 0.0, 1.0) : 0.0;
      filled = target;
      fractional_done = true;
    }
  }
  return out;
}

std::vector<Complex> wall_derivative(const AssembledSystem &system, const Eigen::VectorXcd &u,
                                     const Eigen::VectorXcd &lambda)
{
  const FormOperators &ops = *system.ops;
  const auto n = static_cast<Eigen::Index>(ops.num_nodes());
  require(u.size() == n && lambda.size() == n, "wall_derivative expects nodal vectors");
  const Complex wall = system.wall_factor();
  std::vector<Complex> out(ops.num_lateral());
  for (std::size_t e = 0; e < ops.num_lateral(); ++e)
  {
    const auto &fm = ops.lateral()[e];
    Eigen::Vector3cd ul, ll;
    for (int a = 0; a < 3; ++a)
    {
      ul[a] = u[fm.nodes[a]];
      ll[a] = lambda[fm.nodes[a]];
    }
    const Complex d1 = ll.dot(ops.facet_D1(system.coeffs, e) * ul);
    const Complex m0 = ll.dot(fm.S0.cast<Complex>() * ul);
    out[e] = wall * (d1 - system.coeffs.K2 * m0);
  }
  return out;
}

Evaluation evaluate(const Problem &problem, const RealSparse &gram, const LinerDensity &chi,
                    double k0, bool with_gradient)
{
  require(problem.ops != nullptr, "problem has no operators");
  const AssembledSystem sys =
      assemble(*problem.ops, problem.at(k0), problem.beta_v, chi, problem.sources);
  Evaluation ev;
  if (sys.num_free() == 0)
  {
    ev.state.values = sys.dirichlet;
    ev.J = energy(gram, ev.state.values);
    ev.gradient.assign(with_gradient ? chi.values.size() : 0, 0.0);
    return ev;
  }
  const SparseFactorization lu(sys.matrix);
  ev.state = solve(sys, lu);
  ev.J = energy(gram, ev.state.values);
  if (!with_gradient)
  {
    return ev;
  }
  // J = u^H G u; its variation through the free values is 2 Re(du^H G u), so the adjoint
  // solves M^H lambda = (G u) restricted to the free nodes.
  const Eigen::VectorXcd Gu = gram.cast<Complex>() * ev.state.values;
  const Eigen::VectorXcd lf = lu.solve(sys.restrict_free(Gu), true);
  Eigen::VectorXcd lambda = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(sys.free_of_node.size()));
  for (std::size_t k = 0; k < sys.node_of_free.size(); ++k)
  {
    lambda[sys.node_of_free[k]] = lf[static_cast<Eigen::Index>(k)];
  }
  const auto dA = wall_derivative(sys, ev.state.values, lambda);
  ev.gradient.resize(dA.size());
  for (std::size_t e = 0; e < dA.size(); ++e)
  {
    ev.gradient[e] = -2.0 * dA[e].real();
  }
  return ev;
}

Evaluation objective(const Problem &problem, const RealSparse &gram, const LinerDensity &chi,
                     const OptimizeOptions &options, bool with_gradient)
{
  if (options.mode == Mode::Single)
  {
    return evaluate(problem, gram, chi, options.k0, with_gradient);
  }
  const auto nodes = band_nodes(options.energy);
  auto weights = trapezoid_weights(options.energy);
  if (options.energy.degenerate_band())
  {
    weights = {1.0};
  }
  std::vector<Evaluation> parts(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t j) {
    parts[j] = evaluate(problem, gram, chi, nodes[j], with_gradient);
  });
  Evaluation total;
  total.gradient.assign(with_gradient ? chi.values.size() : 0, 0.0);
  for (std::size_t j = 0; j < nodes.size(); ++j)
  {
    total.J += weights[j] * parts[j].J;
    for (std::size_t e = 0; e < total.gradient.size(); ++e)
    {
      total.gradient[e] += weights[j] * parts[j].gradient[e];
    }
  }
  total.state = std::move(parts.front().state);
  return total;
}

namespace
{

std::vector<double> descent_direction(const std::vector<double> &g, const FeasibleSet &set)
{
  std::vector<double> dir(g.size(), 0.0);
  for (std::size_t e = 0; e < g.size(); ++e)
  {
    const double m = set.weights()[e];
    if (set.is_free(e) && m > 0.0)
    {
      dir[e] = g[e] / m;
    }
  }
  return dir;
}

std::vector<double> step_along(const std::vector<double> &chi, const std::vector<double> &dir,
                               double step)
{
  std::vector<double> raw(chi.size());
  for (std::size_t e = 0; e < chi.size(); ++e)
  {
    raw[e] = chi[e] - step * dir[e];
  }
  return raw;
}

}  // namespace

OptimizeReport minimize(const Problem &problem, const FeasibleSet &set,
                        const LinerDensity &initial, const OptimizeOptions &options)
{
  require(problem.ops != nullptr, "problem has no operators");
  require(set.size() == problem.ops->num_lateral(),
          "feasible set size does not match the lateral facet count");
  if (options.mode == Mode::Band)
  {
    validate(options.energy);
  }
  else
  {
    require(std::isfinite(options.k0) && options.k0 > 0.0, "k0 must be > 0");
  }
  const RealSparse gram = energy_gram(options.energy, *problem.ops);
  return minimize(
      [&](const LinerDensity &chi, bool with_gradient) {
        return objective(problem, gram, chi, options, with_gradient);
      },
      set, initial, options);
}

OptimizeReport minimize(const ObjectiveFn &fn, const FeasibleSet &set,
                        const LinerDensity &initial, const OptimizeOptions &options)
{
  require(options.max_iters >= 0, "max_iters must be >= 0");
  require(std::isfinite(options.tol) && options.tol >= 0.0, "tol must be >= 0");
  require(options.max_backtracks >= 1, "max_backtracks must be >= 1");
  const auto start = std::chrono::steady_clock::now();
  OptimizeReport report;
  LinerDensity chi = project(initial.values, set);
  Evaluation current = fn(chi, true);
  const auto pg_norm = [&](const std::vector<double> &x, const std::vector<double> &g) {
    const auto p = project(step_along(x, descent_direction(g, set), 1.0), set);
    return set.distance(x, p.values);
  };

  double pg = pg_norm(chi.values, current.gradient);
  report.iterates.push_back({0, current.J, 0.0, pg, std::abs(set.mass(chi.values) - set.gamma())});
  report.stop_reason = "max_iters";
  for (int it = 1; it <= options.max_iters; ++it)
  {
    if (pg < options.tol)
    {
      report.converged = true;
      report.stop_reason = "tolerance";
      break;
    }
    const auto dir = descent_direction(current.gradient, set);
    double step = 1.0;
    bool accepted = false;
    bool moved = false;
    LinerDensity candidate;
    Evaluation next;
    for (int bt = 0; bt < options.max_backtracks; ++bt, step *= 0.5)
    {
      candidate = project(step_along(chi.values, dir, step), set);
      double decrease = 0.0;
      for (std::size_t e = 0; e < chi.values.size(); ++e)
      {
        decrease += current.gradient[e] * (chi.values[e] - candidate.values[e]);
      }
      if (candidate.values == chi.values)
      {
        break;
      }
      moved = true;
      next = fn(candidate, false);
      if (next.J <= current.J - 1e-4 * decrease)
      {
        accepted = true;
        break;
      }
    }
    if (!accepted)
    {
      report.converged = true;
      report.stop_reason = moved ? "line_search_exhausted" : "stationary";
      break;
    }
    chi = candidate;
    current = fn(chi, true);
    pg = pg_norm(chi.values, current.gradient);
    report.iterates.push_back(
        {it, current.J, step, pg, std::abs(set.mass(chi.values) - set.gamma())});
  }
  if (report.stop_reason == "max_iters" && pg < options.tol)
  {
    report.converged = true;
    report.stop_reason = "tolerance";
  }

  report.chi = chi.values;
  report.J_relaxed = current.J;
  const LinerDensity bang = threshold(chi, set);
  report.chi_threshold = bang.values;
  report.J_threshold = fn(bang, false).J;
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::string to_json(const OptimizeReport &report)
{
  nlohmann::json j;
  j["converged"] = report.converged;
  j["stop_reason"] = report.stop_reason;
  j["J_relaxed"] = report.J_relaxed;
  j["J_threshold"] = report.J_threshold;
  j["threshold_gap"] = report.J_threshold - report.J_relaxed;
  j["wall_seconds"] = report.wall_seconds;
  auto &its = j["iterates"] = nlohmann::json::array();
  for (const auto &r : report.iterates)
  {
    its.push_back({{"iteration", r.iteration},
                   {"J", r.J},
                   {"step", r.step},
                   {"pg_norm", r.pg_norm},
                   {"mass_error", r.mass_error}});
  }
  j["chi"] = report.chi;
  j["chi_threshold"] = report.chi_threshold;
  return j.dump(2);
}

}  // namespace liner
