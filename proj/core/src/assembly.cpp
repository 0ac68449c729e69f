// SPDX-License-Identifier: Apache-2.0

#include "liner/assembly.hpp"

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "liner/admissibility.hpp"
#include "liner/error.hpp"
#include "liner/parallel.hpp"

namespace liner
{

namespace
{

// Element loops run over fixed-size chunks whose triplets are concatenated in chunk order,
// so the summation order of duplicates does not depend on the thread count.
constexpr std::size_t kChunk = 2048;

template <class Scalar, class Emit>
Eigen::SparseMatrix<Scalar> assemble_chunked(std::size_t n, std::size_t count, Emit &&emit)
{
  using Triplet = Eigen::Triplet<Scalar>;
  const std::size_t chunks = (count + kChunk - 1) / kChunk;
  std::vector<std::vector<Triplet>> buffers(chunks);
  parallel_for(chunks, [&](std::size_t c) {
    const std::size_t end = std::min(count, (c + 1) * kChunk);
    for (std::size_t e = c * kChunk; e < end; ++e)
    {
      emit(e, buffers[c]);
    }
  });
  std::size_t total = 0;
  for (const auto &b : buffers)
  {
    total += b.size();
  }
  std::vector<Triplet> all;
  all.reserve(total);
  for (auto &b : buffers)
  {
    all.insert(all.end(), b.begin(), b.end());
  }
  Eigen::SparseMatrix<Scalar> m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  m.setFromTriplets(all.begin(), all.end());
  return m;
}

// Tangential x-derivative of the barycentric functions of a boundary facet.
Eigen::Vector3d facet_dx(const CylinderMesh &mesh, const BoundaryFacet &facet)
{
  const auto &x = mesh.nodes();
  const Vec3 e1 = x[facet.nodes[1]] - x[facet.nodes[0]];
  const Vec3 e2 = x[facet.nodes[2]] - x[facet.nodes[0]];
  Eigen::Matrix2d G;
  G << e1.dot(e1), e1.dot(e2), e2.dot(e1), e2.dot(e2);
  const Eigen::Vector2d d = G.inverse() * Eigen::Vector2d(e1.x(), e2.x());
  return {-d.x() - d.y(), d.x(), d.y()};
}

FacetMoments moments(const CylinderMesh &mesh, const BoundaryMeasure &measure, int f)
{
  FacetMoments fm;
  fm.facet = f;
  fm.nodes = mesh.facets()[f].nodes;
  for (const auto &q : measure.quadrature(f))
  {
    const Eigen::Vector3d phi(q.bary[0], q.bary[1], q.bary[2]);
    fm.S0 += q.weight * phi * phi.transpose();
    fm.m += q.weight * phi;
    fm.mass += q.weight;
  }
  fm.dx = facet_dx(mesh, mesh.facets()[f]);
  return fm;
}

RealSparse boundary_mass(const CylinderMesh &mesh, const std::vector<FacetMoments> &facets,
                         const std::vector<double> *chi)
{
  return assemble_chunked<double>(
      mesh.num_nodes(), facets.size(), [&](std::size_t e, std::vector<Eigen::Triplet<double>> &out) {
        const double w = chi ? (*chi)[e] : 1.0;
        if (w == 0.0)
        {
          return;
        }
        const auto &fm = facets[e];
        for (int a = 0; a < 3; ++a)
        {
          for (int b = 0; b < 3; ++b)
          {
            out.emplace_back(fm.nodes[a], fm.nodes[b], w * fm.S0(a, b));
          }
        }
      });
}

ComplexSparse to_complex(const RealSparse &m) { return m.cast<Complex>(); }

void check_vector(const Eigen::VectorXcd &v, std::size_t n, const char *name)
{
  require(static_cast<std::size_t>(v.size()) == n,
          std::string("source ") + name + " must have one value per mesh node");
  require(v.allFinite(), std::string("source ") + name + " has non-finite values");
}

}  // namespace

TetGeometry tet_geometry(const CylinderMesh &mesh, std::size_t tet)
{
  const auto &x = mesh.nodes();
  const auto &t = mesh.tets()[tet];
  Eigen::Matrix3d J;
  J.col(0) = x[t[1]] - x[t[0]];
  J.col(1) = x[t[2]] - x[t[0]];
  J.col(2) = x[t[3]] - x[t[0]];
  const Eigen::Matrix3d inv = J.inverse();
  TetGeometry geo;
  geo.grad.bottomRows<3>() = inv;
  geo.grad.row(0) = -inv.colwise().sum();
  geo.volume = std::abs(J.determinant()) / 6.0;
  return geo;
}

SourceData SourceData::zero(std::size_t num_nodes)
{
  const auto n = static_cast<Eigen::Index>(num_nodes);
  return {Eigen::VectorXcd::Zero(n), Eigen::VectorXcd::Zero(n), Eigen::VectorXcd::Zero(n),
          std::nullopt, std::nullopt};
}

FormOperators::FormOperators(const CylinderMesh &mesh, const BoundaryMeasure &measure)
    : mesh_(&mesh), measure_(&measure)
{
  const std::size_t n = mesh.num_nodes();
  const auto &tets = mesh.tets();
  using T = Eigen::Triplet<double>;

  // One pass computing all four volume matrices would need four buffers per chunk; the
  // gradient computation is cheap enough to repeat.
  stiffness_ = assemble_chunked<double>(n, tets.size(), [&](std::size_t e, std::vector<T> &out) {
    const auto [g, vol] = tet_geometry(mesh, e);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        out.emplace_back(tets[e][a], tets[e][b], vol * g.row(a).dot(g.row(b)));
  });
  dx_stiffness_ =
      assemble_chunked<double>(n, tets.size(), [&](std::size_t e, std::vector<T> &out) {
        const auto [g, vol] = tet_geometry(mesh, e);
        for (int a = 0; a < 4; ++a)
          for (int b = 0; b < 4; ++b)
            out.emplace_back(tets[e][a], tets[e][b], vol * g(a, 0) * g(b, 0));
      });
  mass_ = assemble_chunked<double>(n, tets.size(), [&](std::size_t e, std::vector<T> &out) {
    const auto [g, vol] = tet_geometry(mesh, e);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        out.emplace_back(tets[e][a], tets[e][b], vol * (a == b ? 0.1 : 0.05));
  });
  convection_ = assemble_chunked<double>(n, tets.size(), [&](std::size_t e, std::vector<T> &out) {
    const auto [g, vol] = tet_geometry(mesh, e);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        out.emplace_back(tets[e][a], tets[e][b], 0.25 * vol * g(b, 0));
  });

  std::vector<FacetMoments> outlet;
  for (int f : mesh.boundary_of(FacetTag::Out))
  {
    outlet.push_back(moments(mesh, measure, f));
  }
  for (int f : mesh.boundary_of(FacetTag::Lateral))
  {
    lateral_.push_back(moments(mesh, measure, f));
  }
  outlet_mass_ = boundary_mass(mesh, outlet, nullptr);
  lateral_mass_ = boundary_mass(mesh, lateral_, nullptr);
}

Eigen::Matrix3cd FormOperators::facet_D1(const MyersCoefficients &c, std::size_t index) const
{
  const auto &fm = lateral_[index];
  const Complex iM(0.0, c.M0);
  const double a2 = std::norm(c.alpha);
  Eigen::Matrix3cd block;
  for (int i = 0; i < 3; ++i)
  {
    for (int j = 0; j < 3; ++j)
    {
      // sum_q w (c1 phi_j - i M0 d_j) conj(c1 phi_i - i M0 d_i)
      block(i, j) = a2 * (std::norm(c.c1) * fm.S0(i, j) + iM * c.c1 * fm.m(j) * fm.dx(i) -
                          iM * std::conj(c.c1) * fm.dx(j) * fm.m(i) +
                          c.M0 * c.M0 * fm.dx(i) * fm.dx(j) * fm.mass);
    }
  }
  return block;
}

ComplexSparse FormOperators::trace_D1(const MyersCoefficients &coeffs,
                                      const std::vector<double> &chi) const
{
  require(chi.size() == lateral_.size(), "chi must have one value per lateral facet");
  return assemble_chunked<Complex>(
      num_nodes(), lateral_.size(), [&](std::size_t e, std::vector<Eigen::Triplet<Complex>> &out) {
        if (chi[e] == 0.0)
        {
          return;
        }
        const Eigen::Matrix3cd block = facet_D1(coeffs, e);
        const auto &nodes = lateral_[e].nodes;
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b)
            out.emplace_back(nodes[a], nodes[b], chi[e] * block(a, b));
      });
}

RealSparse FormOperators::trace_mass(const std::vector<double> &chi) const
{
  require(chi.size() == lateral_.size(), "chi must have one value per lateral facet");
  return boundary_mass(*mesh_, lateral_, &chi);
}

double liner_mass(const FormOperators &ops, const std::vector<double> &chi)
{
  require(chi.size() == ops.num_lateral(), "chi must have one value per lateral facet");
  double m = 0.0;
  for (std::size_t i = 0; i < chi.size(); ++i)
  {
    m += chi[i] * ops.lateral()[i].mass;
  }
  return m;
}

LinerDensity uniform_density(const FormOperators &ops, double value)
{
  LinerDensity chi{std::vector<double>(ops.num_lateral(), value), 0.0};
  chi.gamma = liner_mass(ops, chi.values);
  return chi;
}

Complex AssembledSystem::wall_factor() const
{
  return Complex(0.0, 1.0) * derived.Y * (derived.Z0 / derived.k0);
}

Eigen::VectorXcd AssembledSystem::expand(const Eigen::VectorXcd &free_values) const
{
  require(static_cast<std::size_t>(free_values.size()) == num_free(),
          "free vector has the wrong dimension");
  Eigen::VectorXcd u = dirichlet;
  for (std::size_t k = 0; k < node_of_free.size(); ++k)
  {
    u[node_of_free[k]] = free_values[static_cast<Eigen::Index>(k)];
  }
  return u;
}

Eigen::VectorXcd AssembledSystem::restrict_free(const Eigen::VectorXcd &nodal) const
{
  require(static_cast<std::size_t>(nodal.size()) == free_of_node.size(),
          "nodal vector has the wrong dimension");
  Eigen::VectorXcd v(static_cast<Eigen::Index>(num_free()));
  for (std::size_t k = 0; k < node_of_free.size(); ++k)
  {
    v[static_cast<Eigen::Index>(k)] = nodal[node_of_free[k]];
  }
  return v;
}

AssembledSystem assemble(const FormOperators &ops, const DerivedParams &derived, Complex beta_v,
                         const LinerDensity &chi, const SourceData &sources,
                         std::optional<double> k0_override)
{
  const std::size_t n = ops.num_nodes();
  require(chi.values.size() == ops.num_lateral(),
          "chi has " + std::to_string(chi.values.size()) + " values but the mesh has " +
              std::to_string(ops.num_lateral()) + " lateral facets");
  for (double v : chi.values)
  {
    require(std::isfinite(v) && v >= 0.0 && v <= 1.0, "chi values must lie in [0, 1]");
  }
  check_vector(sources.f, n, "f");
  check_vector(sources.eta, n, "eta");
  check_vector(sources.g, n, "g");
  if (sources.psi)
  {
    check_vector(*sources.psi, n, "psi");
  }
  if (sources.load)
  {
    check_vector(*sources.load, n, "load");
  }

  AssembledSystem sys;
  sys.ops = &ops;
  sys.derived = k0_override ? with_wavenumber(derived, *k0_override) : derived;
  sys.coeffs = myers_coeffs(sys.derived, beta_v);
  sys.chi = chi.values;
  const DerivedParams &d = sys.derived;
  const MyersCoefficients &c = sys.coeffs;

  sys.trace_D1 = ops.trace_D1(c, chi.values);
  sys.trace_mass = ops.trace_mass(chi.values);
  const Complex wall = sys.wall_factor();
  const Complex I(0.0, 1.0);

  sys.theta = to_complex(ops.stiffness()) - Complex(d.M0 * d.M0) * to_complex(ops.dx_stiffness()) +
              wall * sys.trace_D1;
  const RealSparse skew = ops.convection() - RealSparse(ops.convection().transpose());
  sys.xi = Complex(-d.k0 * d.k0) * to_complex(ops.mass()) + I * (d.k0 * d.M0) * to_complex(skew) +
           I * d.k * to_complex(ops.outlet_mass()) - wall * c.K2 * to_complex(sys.trace_mass);

  // Degrees of freedom: everything off the inflow plane.
  sys.free_of_node.assign(n, -1);
  sys.dirichlet = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
  {
    if (ops.mesh().is_inflow_node(static_cast<int>(i)))
    {
      sys.dirichlet[static_cast<Eigen::Index>(i)] = sources.g[static_cast<Eigen::Index>(i)];
    }
    else
    {
      sys.free_of_node[i] = static_cast<int>(sys.node_of_free.size());
      sys.node_of_free.push_back(static_cast<int>(i));
    }
  }

  Eigen::VectorXcd b = -(ops.mass().cast<Complex>() * sources.f) +
                       ops.lateral_mass().cast<Complex>() * sources.eta;
  if (sources.psi)
  {
    b += ops.outlet_mass().cast<Complex>() * *sources.psi;
  }
  if (sources.load)
  {
    b += *sources.load;
  }

  const ComplexSparse full = sys.full();
  sys.rhs = sys.restrict_free(b);
  std::vector<Eigen::Triplet<Complex>> triplets;
  triplets.reserve(static_cast<std::size_t>(full.nonZeros()));
  for (int col = 0; col < full.outerSize(); ++col)
  {
    const int fc = sys.free_of_node[col];
    for (ComplexSparse::InnerIterator it(full, col); it; ++it)
    {
      const int fr = sys.free_of_node[it.row()];
      if (fr < 0)
      {
        continue;
      }
      if (fc >= 0)
      {
        triplets.emplace_back(fr, fc, it.value());
      }
      else
      {
        sys.rhs[fr] -= it.value() * sys.dirichlet[col];
      }
    }
  }
  const auto nf = static_cast<Eigen::Index>(sys.num_free());
  sys.matrix.resize(nf, nf);
  sys.matrix.setFromTriplets(triplets.begin(), triplets.end());
  sys.matrix.makeCompressed();
  return sys;
}

Complex quadratic(const RealSparse &B, const Eigen::VectorXcd &p, const Eigen::VectorXcd &q)
{
  return q.dot(B.cast<Complex>() * p);
}

Complex quadratic(const ComplexSparse &B, const Eigen::VectorXcd &p, const Eigen::VectorXcd &q)
{
  return q.dot(B * p);
}

Complex apply_form(const AssembledSystem &system, const Eigen::VectorXcd &p,
                   const Eigen::VectorXcd &q)
{
  const auto n = static_cast<Eigen::Index>(system.free_of_node.size());
  require(p.size() == n && q.size() == n, "apply_form expects nodal vectors of the mesh size");
  return q.dot(system.theta * p) + q.dot(system.xi * p);
}

double v_norm(const AssembledSystem &system, const Eigen::VectorXcd &p)
{
  const auto n = static_cast<Eigen::Index>(system.free_of_node.size());
  require(p.size() == n, "v_norm expects a nodal vector of the mesh size");
  const double grad = quadratic(system.ops->stiffness(), p, p).real();
  const double trace = quadratic(system.trace_D1, p, p).real();
  return std::sqrt(std::max(0.0, grad + trace));
}

}  // namespace liner
