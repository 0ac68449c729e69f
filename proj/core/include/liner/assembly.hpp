// SPDX-License-Identifier: Apache-2.0

#ifndef LINER_ASSEMBLY_HPP
#define LINER_ASSEMBLY_HPP

#include <array>
#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "liner/measure.hpp"
#include "liner/mesh.hpp"
#include "liner/params.hpp"

namespace liner
{

using RealSparse = Eigen::SparseMatrix<double>;
using ComplexSparse = Eigen::SparseMatrix<Complex>;

// Gradients of the four barycentric functions (rows) and the volume of a tetrahedron.
struct TetGeometry
{
  Eigen::Matrix<double, 4, 3> grad;
  double volume;
};

TetGeometry tet_geometry(const CylinderMesh &mesh, std::size_t tet);

// Liner density, one value per lateral facet in the order of boundary_of(Lateral).
struct LinerDensity
{
  std::vector<double> values;
  double gamma = 0.0;  // integral of chi against the boundary measure
};

//
// Source terms, all sampled at mesh nodes. f is the volume source, eta the lateral source,
// g the Dirichlet data on x = 0 (only inflow entries are read), psi an outlet source.
// `load`, when present, is added to the right-hand side as is: entry i is the value of a
// functional at the basis function of node i.
//
struct SourceData
{
  Eigen::VectorXcd f;
  Eigen::VectorXcd eta;
  Eigen::VectorXcd g;
  std::optional<Eigen::VectorXcd> psi;
  std::optional<Eigen::VectorXcd> load;

  static SourceData zero(std::size_t num_nodes);
};

// Quadrature moments of one boundary facet against the measure:
//   S0(a,b) = sum_q w phi_a phi_b,   m(a) = sum_q w phi_a,   mass = sum_q w,
// and the tangential x-derivative of each barycentric function (constant on the facet).
struct FacetMoments
{
  int facet = -1;
  std::array<int, 3> nodes{};
  Eigen::Matrix3d S0 = Eigen::Matrix3d::Zero();
  Eigen::Vector3d m = Eigen::Vector3d::Zero();
  double mass = 0.0;
  Eigen::Vector3d dx = Eigen::Vector3d::Zero();
};

//
// The parameter-independent pieces of the discrete form on one mesh and measure. Holds
// references to both; they must outlive this object and every system assembled from it.
//
class FormOperators
{
public:
  FormOperators(const CylinderMesh &mesh, const BoundaryMeasure &measure);

  const CylinderMesh &mesh() const { return *mesh_; }
  const BoundaryMeasure &measure() const { return *measure_; }
  std::size_t num_nodes() const { return mesh_->num_nodes(); }
  std::size_t num_lateral() const { return lateral_.size(); }

  const RealSparse &stiffness() const { return stiffness_; }        // (grad phi_j, grad phi_i)
  const RealSparse &dx_stiffness() const { return dx_stiffness_; }  // (dx phi_j, dx phi_i)
  const RealSparse &mass() const { return mass_; }                  // (phi_j, phi_i)
  const RealSparse &convection() const { return convection_; }      // (dx phi_j, phi_i)
  const RealSparse &outlet_mass() const { return outlet_mass_; }    // mu-mass on x = L
  const RealSparse &lateral_mass() const { return lateral_mass_; }  // mu-mass on the wall

  const std::vector<FacetMoments> &lateral() const { return lateral_; }

  // <D1 phi_j, D1 phi_i>_chi and <phi_j, phi_i>_chi. Facets with chi = 0 contribute no
  // entries.
  ComplexSparse trace_D1(const MyersCoefficients &coeffs, const std::vector<double> &chi) const;
  RealSparse trace_mass(const std::vector<double> &chi) const;

  // Local 3x3 blocks of the two forms above on one lateral facet with chi = 1.
  Eigen::Matrix3cd facet_D1(const MyersCoefficients &coeffs, std::size_t lateral_index) const;

private:
  const CylinderMesh *mesh_;
  const BoundaryMeasure *measure_;
  RealSparse stiffness_, dx_stiffness_, mass_, convection_, outlet_mass_, lateral_mass_;
  std::vector<FacetMoments> lateral_;
};

// Integral of chi against the boundary measure.
double liner_mass(const FormOperators &ops, const std::vector<double> &chi);

// Density with the same value on every lateral facet; gamma is its mass.
LinerDensity uniform_density(const FormOperators &ops, double value);

//
// Discrete system for the free (non-inflow) nodes. `theta` and `xi` are the full
// node-by-node matrices of the two parts of the form; `matrix` is their sum restricted to
// free nodes, with the Dirichlet lifting moved into `rhs`. Entry (i, j) of any matrix is
// the form evaluated at (phi_j, phi_i).
//
struct AssembledSystem
{
  const FormOperators *ops = nullptr;
  DerivedParams derived;
  MyersCoefficients coeffs;
  std::vector<double> chi;

  ComplexSparse theta;
  ComplexSparse xi;
  ComplexSparse trace_D1;  // chi-weighted, without the i Y Z0/k0 factor
  RealSparse trace_mass;   // chi-weighted

  ComplexSparse matrix;
  Eigen::VectorXcd rhs;
  std::vector<int> free_of_node;  // -1 on inflow nodes
  std::vector<int> node_of_free;
  Eigen::VectorXcd dirichlet;     // nodal, zero away from the inflow plane

  std::size_t num_free() const { return node_of_free.size(); }
  ComplexSparse full() const { return theta + xi; }
  // Prefactor i Y Z0 / k0 of the wall terms.
  Complex wall_factor() const;

  // Full nodal vector from free values, inflow nodes set to the Dirichlet data.
  Eigen::VectorXcd expand(const Eigen::VectorXcd &free_values) const;
  Eigen::VectorXcd restrict_free(const Eigen::VectorXcd &nodal) const;
};

// Validates chi (size, range) and the sources, then assembles. A k0_override replaces k0
// with M0 fixed and k = k0/M0.
AssembledSystem assemble(const FormOperators &ops, const DerivedParams &derived, Complex beta_v,
                         const LinerDensity &chi, const SourceData &sources,
                         std::optional<double> k0_override = std::nullopt);

// q^H M p over full nodal vectors, i.e. the form A(p, q).
Complex apply_form(const AssembledSystem &system, const Eigen::VectorXcd &p,
                   const Eigen::VectorXcd &q);

// sqrt(|grad p|^2 + |D1 p|_chi^2); only a seminorm when chi vanishes.
double v_norm(const AssembledSystem &system, const Eigen::VectorXcd &p);

// q^H B p for a real or complex sparse matrix.
Complex quadratic(const RealSparse &B, const Eigen::VectorXcd &p, const Eigen::VectorXcd &q);
Complex quadratic(const ComplexSparse &B, const Eigen::VectorXcd &p, const Eigen::VectorXcd &q);

}  // namespace liner

#endif  // LINER_ASSEMBLY_HPP
