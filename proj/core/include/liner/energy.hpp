// SPDX-License-Identifier: Apache-2.0

#ifndef LINER_ENERGY_HPP
#define LINER_ENERGY_HPP

#include <functional>
#include <optional>
#include <vector>

#include "liner/assembly.hpp"

namespace liner
{

// J = a |u|^2_Omega + b |grad u|^2_Omega + d |Tr u|^2_{wall, mu}, integrated over the band
// [k_min, k_max] by the composite trapezoid rule on n_quad nodes.
struct EnergySpec
{
  double a = 1.0;
  double b = 0.0;
  double d = 0.0;
  double k_min = 1.0;
  double k_max = 1.0;
  int n_quad = 2;

  bool degenerate_band() const { return k_min == k_max; }
};

void validate(const EnergySpec &spec);

// a M + b K + d M_wall.
RealSparse energy_gram(const EnergySpec &spec, const FormOperators &ops);

double energy(const RealSparse &gram, const Eigen::VectorXcd &u);
double energy(const EnergySpec &spec, const FormOperators &ops, const Eigen::VectorXcd &u);

//
// Everything needed to assemble the state system at any wavenumber except chi. With an
// impedance table the admittance follows k0; otherwise it stays at derived.Y.
//
struct Problem
{
  const FormOperators *ops = nullptr;
  DerivedParams derived;
  Complex beta_v{0.0, 0.0};
  SourceData sources;
  std::optional<ImpedanceModel> impedance;

  DerivedParams at(double k0) const;
};

// Band nodes and trapezoid weights; a degenerate band gives one node of weight 0.
std::vector<double> band_nodes(const EnergySpec &spec);
std::vector<double> trapezoid_weights(const EnergySpec &spec);

struct BandEnergy
{
  std::vector<double> k0;
  std::vector<double> J;
  std::vector<double> weights;
  double total = 0.0;
};

// Integrates an arbitrary integrand over the band; nodes are evaluated in parallel and
// summed in node order.
BandEnergy integrate_band(const EnergySpec &spec, const std::function<double(double)> &J);

// Solves the state problem at every band node. A solver failure is rethrown naming k0.
BandEnergy total_energy(const EnergySpec &spec, const Problem &problem, const LinerDensity &chi);

}  // namespace liner

#endif  // LINER_ENERGY_HPP
