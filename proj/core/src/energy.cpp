// SPDX-License-Identifier: Apache-2.0

#include "liner/energy.hpp"

#include <cmath>
#include <cstdio>

#include "liner/error.hpp"
#include "liner/parallel.hpp"
#include "liner/solver.hpp"

namespace liner
{

void validate(const EnergySpec &spec)
{
  require(std::isfinite(spec.a) && spec.a >= 0.0, "energy weight a must be >= 0");
  require(std::isfinite(spec.b) && spec.b >= 0.0, "energy weight b must be >= 0");
  require(std::isfinite(spec.d) && spec.d >= 0.0, "energy weight d must be >= 0");
  require(spec.a * spec.a + spec.b * spec.b > 0.0, "energy weights need a^2 + b^2 > 0");
  require(std::isfinite(spec.k_min) && spec.k_min > 0.0, "band k_min must be > 0");
  require(std::isfinite(spec.k_max) && spec.k_max >= spec.k_min, "band needs k_max >= k_min");
  require(spec.degenerate_band() || spec.n_quad >= 2,
          "band quadrature needs n_quad >= 2 for a non-degenerate band");
}

RealSparse energy_gram(const EnergySpec &spec, const FormOperators &ops)
{
  return spec.a * ops.mass() + spec.b * ops.stiffness() + spec.d * ops.lateral_mass();
}

double energy(const RealSparse &gram, const Eigen::VectorXcd &u)
{
  require(u.size() == gram.rows(), "energy expects a nodal vector of the mesh size");
  return std::max(0.0, quadratic(gram, u, u).real());
}

double energy(const EnergySpec &spec, const FormOperators &ops, const Eigen::VectorXcd &u)
{
  return energy(energy_gram(spec, ops), u);
}

DerivedParams Problem::at(double k0) const
{
  DerivedParams d = with_wavenumber(derived, k0);
  if (impedance && !impedance->is_constant())
  {
    d = with_impedance(d, impedance->at(k0));
  }
  return d;
}

std::vector<double> band_nodes(const EnergySpec &spec)
{
  if (spec.degenerate_band())
  {
    return {spec.k_min};
  }
  std::vector<double> k(static_cast<std::size_t>(spec.n_quad));
  const double h = (spec.k_max - spec.k_min) / (spec.n_quad - 1);
  for (int j = 0; j < spec.n_quad; ++j)
  {
    k[static_cast<std::size_t>(j)] = j + 1 == spec.n_quad ? spec.k_max : spec.k_min + j * h;
  }
  return k;
}

std::vector<double> trapezoid_weights(const EnergySpec &spec)
{
  if (spec.degenerate_band())
  {
    return {0.0};
  }
  const double h = (spec.k_max - spec.k_min) / (spec.n_quad - 1);
  std::vector<double> w(static_cast<std::size_t>(spec.n_quad), h);
  w.front() = w.back() = 0.5 * h;
  return w;
}

BandEnergy integrate_band(const EnergySpec &spec, const std::function<double(double)> &J)
{
  validate(spec);
  BandEnergy band;
  band.k0 = band_nodes(spec);
  band.weights = trapezoid_weights(spec);
  band.J.assign(band.k0.size(), 0.0);
  parallel_for(band.k0.size(), [&](std::size_t j) { band.J[j] = J(band.k0[j]); });
  for (std::size_t j = 0; j < band.k0.size(); ++j)
  {
    band.total += band.weights[j] * band.J[j];
  }
  return band;
}

BandEnergy total_energy(const EnergySpec &spec, const Problem &problem, const LinerDensity &chi)
{
  require(problem.ops != nullptr, "problem has no operators");
  const RealSparse gram = energy_gram(spec, *problem.ops);
  return integrate_band(spec, [&](double k0) {
    try
    {
      const AssembledSystem sys =
          assemble(*problem.ops, problem.at(k0), problem.beta_v, chi, problem.sources);
      return energy(gram, solve(sys).values);
    }
    catch (const NumericalError &e)
    {
      char buffer[64];
      std::snprintf(buffer, sizeof buffer, "band node k0 = %.17g: ", k0);
      throw NumericalError(buffer + std::string(e.what()));
    }
  });
}

}  // namespace liner
