// SPDX-License-Identifier: Apache-2.0

#ifndef LINER_OPTIMIZE_HPP
#define LINER_OPTIMIZE_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "liner/energy.hpp"
#include "liner/solver.hpp"

namespace liner
{

//
// { 0 <= chi <= 1, sum_F m_F chi_F = gamma } with m_F the measure of lateral facet F.
// Facets outside `free` keep whatever value they are given and count towards the mass.
//
class FeasibleSet
{
public:
  FeasibleSet(std::vector<double> weights, double gamma, std::vector<std::uint8_t> free = {});
  static FeasibleSet of(const FormOperators &ops, double gamma,
                        std::vector<std::uint8_t> free = {});

  double gamma() const { return gamma_; }
  const std::vector<double> &weights() const { return weights_; }
  bool is_free(std::size_t i) const { return free_[i] != 0; }
  std::size_t size() const { return weights_.size(); }

  double mass(const std::vector<double> &chi) const;
  bool contains(const std::vector<double> &chi, double mass_tol = 1e-12) const;
  // Weighted distance sqrt(sum m_F (a_F - b_F)^2).
  double distance(const std::vector<double> &a, const std::vector<double> &b) const;

private:
  std::vector<double> weights_;
  double gamma_;
  std::vector<std::uint8_t> free_;
};

// Weighted-L2 projection onto the feasible set: chi = clamp(raw + tau, 0, 1) on free
// facets, tau bracketed by bisection and then solved exactly on the resulting active set.
// A feasible input is returned unchanged.
LinerDensity project(const std::vector<double> &raw, const FeasibleSet &set);

// Greedy bang-bang rounding: free facets sorted by value (ties by index) are set to 1
// while the mass allows; one facet takes the fractional remainder.
LinerDensity threshold(const LinerDensity &chi, const FeasibleSet &set);

// Derivative of the wall part of the form with respect to chi on each lateral facet,
// evaluated at (u, lambda): i Y Z0/k0 ( <D1 u, D1 lambda>_F - K^2 <u, lambda>_F ).
std::vector<Complex> wall_derivative(const AssembledSystem &system, const Eigen::VectorXcd &u,
                                     const Eigen::VectorXcd &lambda);

struct Evaluation
{
  double J = 0.0;
  std::vector<double> gradient;  // dJ/dchi_F, empty unless requested
  SolutionField state;
};

// J(k0, chi) = energy(u(chi)) and, optionally, its gradient by the adjoint method.
Evaluation evaluate(const Problem &problem, const RealSparse &gram, const LinerDensity &chi,
                    double k0, bool with_gradient);

enum class Mode
{
  Single,
  Band
};

struct OptimizeOptions
{
  Mode mode = Mode::Single;
  double k0 = 1.0;     // single mode
  EnergySpec energy;   // weights; band for band mode
  int max_iters = 50;
  double tol = 1e-6;   // on the weighted projected-gradient norm
  int max_backtracks = 60;
};

struct IterateRecord
{
  int iteration = 0;
  double J = 0.0;
  double step = 0.0;
  double pg_norm = 0.0;
  double mass_error = 0.0;
};

struct OptimizeReport
{
  std::vector<IterateRecord> iterates;
  std::vector<double> chi;
  std::vector<double> chi_threshold;
  double J_relaxed = 0.0;
  double J_threshold = 0.0;
  bool converged = false;
  std::string stop_reason;  // "tolerance", "max_iters", "line_search_exhausted", "stationary"
  double wall_seconds = 0.0;
};

// Objective of the chosen mode: J at k0, or the trapezoid band integral. A degenerate band
// uses the single-point value with weight 1.
Evaluation objective(const Problem &problem, const RealSparse &gram, const LinerDensity &chi,
                     const OptimizeOptions &options, bool with_gradient);

// Projected gradient descent with Armijo backtracking (start 1, shrink 0.5, constant
// 1e-4), descending along the measure-weighted gradient g_F / m_F.
OptimizeReport minimize(const Problem &problem, const FeasibleSet &set,
                        const LinerDensity &initial, const OptimizeOptions &options);

// Same iteration on an arbitrary objective; mode, k0 and energy in `options` are unused.
using ObjectiveFn = std::function<Evaluation(const LinerDensity &, bool with_gradient)>;
OptimizeReport minimize(const ObjectiveFn &fn, const FeasibleSet &set,
                        const LinerDensity &initial, const OptimizeOptions &options);

std::string to_json(const OptimizeReport &report);

}  // namespace liner

#endif  // LINER_OPTIMIZE_HPP
