// SPDX-License-Identifier: Apache-2.0

#ifndef LINER_SOLVER_HPP
#define LINER_SOLVER_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "liner/assembly.hpp"

namespace liner
{

//
// LU factorization of a complex sparse matrix. Uses UMFPACK when available, in which case
// the adjoint solve reuses the same factors; otherwise Eigen's SparseLU.
//
class SparseFactorization
{
public:
  explicit SparseFactorization(const ComplexSparse &matrix);
  ~SparseFactorization();
  SparseFactorization(SparseFactorization &&) noexcept;
  SparseFactorization &operator=(SparseFactorization &&) noexcept;

  // Solves M x = b, or M^H x = b when adjoint is set, with iterative refinement until the
  // relative residual is at most 1e-10. Throws NumericalError when that is not reached.
  Eigen::VectorXcd solve(const Eigen::VectorXcd &b, bool adjoint = false,
                         double *residual = nullptr) const;

  // Reciprocal condition estimate, NaN when the backend does not provide one.
  double rcond() const;
  static const char *backend();

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct SolutionField
{
  Eigen::VectorXcd values;  // full node set; inflow nodes carry g
  double k0 = 0.0;
  std::uint64_t chi_hash = 0;
  double residual = 0.0;  // relative algebraic residual of the free system
  double rcond = 0.0;
  std::vector<std::string> warnings;
};

std::uint64_t hash_chi(const std::vector<double> &chi);

// Admissibility warning for the system's beta_v and admittance, or nothing when admissible.
std::optional<std::string> admissibility_warning(const AssembledSystem &system);

SolutionField solve(const AssembledSystem &system);
SolutionField solve(const AssembledSystem &system, const SparseFactorization &lu);

//
// Closed-form complex field with the derivatives needed to build manufactured data.
//
struct ExactField
{
  std::function<Complex(const Vec3 &)> value;
  std::function<Eigen::Vector3cd(const Vec3 &)> gradient;
  std::function<Complex(const Vec3 &)> laplacian;
  std::function<Complex(const Vec3 &)> dxx;

  // exp(i kappa x).
  static ExactField plane_wave(double kappa);
  // exp(0.8 i x) (1 + 0.3 y^2 + 0.4 i z + 0.2 y z).
  static ExactField smooth();
  // x^2 + i y z.
  static ExactField quadratic();
  static ExactField constant(Complex c);
};

struct ManufacturedCase
{
  // f and g sampled at nodes; the boundary data enters through `load`, the exact value of
  // the natural-boundary and wall functionals at each basis function. eta and psi are zero.
  SourceData sources;
  Eigen::VectorXcd exact;  // nodal interpolant

  // Strong-form boundary data at the nodes, for inspection: the normal derivative and the
  // wall operator D(D + i M0 beta_v dx) p on lateral nodes, dp/dn + i k p on outlet nodes.
  Eigen::VectorXcd normal_derivative;
  Eigen::VectorXcd wall_operator;
  Eigen::VectorXcd outlet_data;
};

ManufacturedCase manufactured_case(const FormOperators &ops, const DerivedParams &derived,
                                   Complex beta_v, const LinerDensity &chi,
                                   const ExactField &exact);

struct FieldErrors
{
  double l2 = 0.0;
  double h1 = 0.0;  // full H1 norm
  double v = 0.0;   // V-norm of the error
};

FieldErrors field_errors(const AssembledSystem &system, const Eigen::VectorXcd &u,
                         const ExactField &exact);

struct StudyCase
{
  DerivedParams derived;
  Complex beta_v;
  double surface_weight = 1.0;
  std::optional<CantorComponent> cantor;
  std::function<double(const Vec3 &)> chi;  // evaluated at lateral facet centroids
  ExactField exact;
};

struct StudyRow
{
  MeshSpec spec;
  std::size_t nodes = 0;
  double h = 0.0;
  FieldErrors errors;
  double residual = 0.0;
  double seconds = 0.0;
};

struct StudyResult
{
  std::vector<StudyRow> rows;
  // Least-squares slopes of log(error) against log(h).
  double l2_order = 0.0;
  double h1_order = 0.0;
  double v_order = 0.0;
};

StudyResult convergence_study(const std::vector<MeshSpec> &ladder, const StudyCase &study);

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double> &x, const std::vector<double> &y);

}  // namespace liner

#endif  // LINER_SOLVER_HPP
