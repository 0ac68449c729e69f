// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include <Eigen/Dense>

#include "liner/admissibility.hpp"
#include "liner/assembly.hpp"
#include "liner/error.hpp"
#include "liner/quadrature.hpp"
#include "support.hpp"

namespace liner
{
namespace
{

using testing::Model;

Eigen::MatrixXcd dense(const ComplexSparse &m) { return Eigen::MatrixXcd(m); }

// P1 basis on a tetrahedron as affine functions phi_a(x) = c_a + g_a . x, from the inverse
// of the vertex matrix; independent of the barycentric-gradient route used by assembly.
struct AffineBasis
{
  Eigen::Matrix4d coeff;  // column a: (c_a, g_a)
};

AffineBasis affine_basis(const CylinderMesh &mesh, const std::array<int, 4> &t)
{
  Eigen::Matrix4d V;
  for (int a = 0; a < 4; ++a)
  {
    const Vec3 &x = mesh.nodes()[t[a]];
    V.row(a) << 1.0, x.x(), x.y(), x.z();
  }
  return {V.inverse()};
}

// Entry (i, j) = A(phi_j, phi_i), assembled by direct quadrature of the written-out form.
Eigen::MatrixXcd oracle_matrix(const Model &s, const DerivedParams &d, Complex beta,
                               const std::vector<double> &chi)
{
  const auto n = static_cast<Eigen::Index>(s.mesh.num_nodes());
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(n, n);
  const Complex I(0.0, 1.0);
  const double k0 = d.k0, M0 = d.M0;
  for (const auto &t : s.mesh.tets())
  {
    const AffineBasis basis = affine_basis(s.mesh, t);
    const auto &x = s.mesh.nodes();
    const double vol =
        std::abs((x[t[1]] - x[t[0]]).dot((x[t[2]] - x[t[0]]).cross(x[t[3]] - x[t[0]]))) / 6.0;
    for (const auto &q : quadrature::tet_degree2())
    {
      Vec3 p = Vec3::Zero();
      for (int a = 0; a < 4; ++a) p += q.bary[a] * x[t[a]];
      for (int i = 0; i < 4; ++i)
      {
        const Eigen::Vector4d ci = basis.coeff.col(i);
        const double phi_i = ci[0] + ci.tail<3>().dot(p);
        const Vec3 grad_i = ci.tail<3>();
        for (int j = 0; j < 4; ++j)
        {
          const Eigen::Vector4d cj = basis.coeff.col(j);
          const double phi_j = cj[0] + cj.tail<3>().dot(p);
          const Vec3 grad_j = cj.tail<3>();
          const Complex Dj = k0 * phi_j - I * M0 * grad_j.x();
          const Complex Di = k0 * phi_i - I * M0 * grad_i.x();
          A(t[i], t[j]) += q.weight * vol * (grad_j.dot(grad_i) - Dj * std::conj(Di));
        }
      }
    }
  }
  for (int f : s.mesh.boundary_of(FacetTag::Out))
  {
    const auto &nodes = s.mesh.facets()[f].nodes;
    for (const auto &q : s.measure.quadrature(f))
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          A(nodes[i], nodes[j]) += I * d.k * q.weight * q.bary[j] * q.bary[i];
  }
  const MyersCoefficients c = myers_coeffs(d, beta);
  const Complex wall = I * d.Y * d.Z0 / k0;
  const auto &lateral = s.mesh.boundary_of(FacetTag::Lateral);
  for (std::size_t e = 0; e < lateral.size(); ++e)
  {
    const BoundaryFacet &facet = s.mesh.facets()[lateral[e]];
    // Tangential x-derivative of the trace: x-gradient of the owning tet's basis.
    const auto &tet = s.mesh.tets()[facet.tet];
    const AffineBasis basis = affine_basis(s.mesh, tet);
    std::array<double, 3> dx{};
    for (int a = 0; a < 3; ++a)
    {
      const int local = static_cast<int>(std::find(tet.begin(), tet.end(), facet.nodes[a]) - tet.begin());
      dx[a] = basis.coeff(1, local);
    }
    for (const auto &q : s.measure.quadrature(lateral[e]))
    {
      for (int i = 0; i < 3; ++i)
      {
        const Complex D1i = c.alpha * (c.c1 * q.bary[i] - I * M0 * dx[i]);
        for (int j = 0; j < 3; ++j)
        {
          const Complex D1j = c.alpha * (c.c1 * q.bary[j] - I * M0 * dx[j]);
          A(facet.nodes[i], facet.nodes[j]) +=
              wall * chi[e] * q.weight * (D1j * std::conj(D1i) - c.K2 * q.bary[j] * q.bary[i]);
        }
      }
    }
  }
  return A;
}

AssembledSystem system_for(const Model &s, const DerivedParams &d, Complex beta,
                           const std::vector<double> &chi)
{
  LinerDensity density{chi, liner_mass(s.ops, chi)};
  return assemble(s.ops, d, beta, density, SourceData::zero(s.mesh.num_nodes()));
}

TEST(Assembly, MatchesHandQuadratureOracle)
{
  MeshSpec spec = testing::small_spec();
  spec.n_axial = 2;
  const Model s(spec);
  const DerivedParams d = derive(testing::reference_physics());
  std::mt19937_64 rng(1);
  const auto chi = testing::random_chi(s.ops.num_lateral(), rng);
  for (Complex beta : {Complex(0.5, 0.5), Complex(0.0, 0.0), Complex(-0.3, 0.6)})
  {
    const AssembledSystem sys = system_for(s, d, beta, chi);
    const Eigen::MatrixXcd expected = oracle_matrix(s, d, beta, chi);
    const Eigen::MatrixXcd actual = dense(sys.full());
    const double scale = expected.cwiseAbs().maxCoeff();
    EXPECT_LT((expected - actual).cwiseAbs().maxCoeff(), 1e-12 * scale) << "beta " << beta;
  }
}

TEST(Assembly, ZeroChiRemovesWallBlocks)
{
  const Model s(testing::small_spec());
  const DerivedParams d = derive(testing::reference_physics());
  const std::vector<double> zero(s.ops.num_lateral(), 0.0);
  const AssembledSystem sys = system_for(s, d, Complex(0.5, 0.5), zero);
  EXPECT_EQ(sys.trace_D1.nonZeros(), 0);
  EXPECT_EQ(sys.trace_mass.nonZeros(), 0);
  const AssembledSystem other = system_for(s, d, Complex(-0.2, 0.7), zero);
  EXPECT_EQ((dense(sys.full()) - dense(other.full())).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Assembly, ZeroBetaGivesIngardMyersBlock)
{
  const Model s(testing::small_spec());
  const DerivedParams d = derive(testing::reference_physics());
  std::mt19937_64 rng(2);
  const auto chi = testing::random_chi(s.ops.num_lateral(), rng);
  const AssembledSystem sys = system_for(s, d, Complex(0.0, 0.0), chi);
  // <D phi_j, D phi_i>_chi with D = k0 - i M0 dx, by facet moments.
  const Complex I(0.0, 1.0);
  Eigen::MatrixXcd expected = Eigen::MatrixXcd::Zero(sys.trace_D1.rows(), sys.trace_D1.cols());
  for (std::size_t e = 0; e < s.ops.num_lateral(); ++e)
  {
    const auto &fm = s.ops.lateral()[e];
    for (const auto &q : s.measure.quadrature(fm.facet))
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          expected(fm.nodes[i], fm.nodes[j]) +=
              chi[e] * q.weight * (d.k0 * q.bary[j] - I * d.M0 * fm.dx(j)) *
              std::conj(d.k0 * q.bary[i] - I * d.M0 * fm.dx(i));
  }
  EXPECT_LT((expected - dense(sys.trace_D1)).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_EQ(sys.coeffs.K2, Complex(0.0, 0.0));
}

TEST(Assembly, Sesquilinear)
{
  const Model s(testing::small_spec());
  const DerivedParams d = derive(testing::reference_physics());
  std::mt19937_64 rng(3);
  const AssembledSystem sys =
      system_for(s, d, Complex(0.5, 0.5), testing::random_chi(s.ops.num_lateral(), rng));
  const auto p = testing::random_vector(s.mesh.num_nodes(), rng);
  const auto q = testing::random_vector(s.mesh.num_nodes(), rng);
  const Complex lambda(0.3, -1.7);
  const Complex base = apply_form(sys, p, q);
  EXPECT_NEAR(std::abs(apply_form(sys, p, lambda * q) - std::conj(lambda) * base), 0.0,
              1e-12 * std::abs(base));
  EXPECT_NEAR(std::abs(apply_form(sys, lambda * p, q) - lambda * base), 0.0,
              1e-12 * std::abs(base));
  EXPECT_THROW(apply_form(sys, p, q.head(3)), ValidationError);
}

TEST(Assembly, ImaginaryPartDecomposesIntoNonnegativeBlocks)
{
  const Model s(testing::small_spec(1));
  std::mt19937_64 rng(4);
  const DerivedParams d = derive(testing::reference_physics());
  int checked = 0;
  while (checked < 20)
  {
    const Complex beta = testing::random_in_disc(rng, 0.95);
    if (!is_admissible({beta, d.r}))
    {
      continue;
    }
    const auto chi = testing::random_chi(s.ops.num_lateral(), rng);
    const AssembledSystem sys = system_for(s, d, beta, chi);
    const auto p = testing::random_vector(s.mesh.num_nodes(), rng);
    const double out = quadratic(s.ops.outlet_mass(), p, p).real();
    const double d1 = quadratic(sys.trace_D1, p, p).real();
    const double m = quadratic(sys.trace_mass, p, p).real();
    const double zk = d.Z0 / d.k0;
    const Complex K2 = sys.coeffs.K2;
    const double t1 = d.k * out;
    const double t2 = d.Y.real() * zk * d1;
    const double t3 = -zk * (d.Y.real() * K2.real() - d.Y.imag() * K2.imag()) * m;
    EXPECT_GE(t1, 0.0);
    EXPECT_GE(t2, 0.0);
    EXPECT_GE(t3, 0.0);
    const double im = apply_form(sys, p, p).imag();
    EXPECT_NEAR(im, t1 + t2 + t3, 1e-11 * (t1 + t2 + t3));
    ++checked;
  }
}

TEST(Assembly, ThetaIsCoercive)
{
  const Model s(testing::small_spec(1));
  const DerivedParams d = derive(testing::reference_physics());
  std::mt19937_64 rng(5);
  const AssembledSystem sys =
      system_for(s, d, Complex(0.5, 0.5), testing::random_chi(s.ops.num_lateral(), rng));
  const double theta = std::arg(d.Y) - M_PI / 2.0;
  const double c =
      std::abs(std::sin(theta / 2.0)) * std::min(1.0 - d.M0 * d.M0, std::abs(d.Y) * d.Z0 / d.k0);
  for (int trial = 0; trial < 100; ++trial)
  {
    Eigen::VectorXcd p = testing::random_vector(s.mesh.num_nodes(), rng);
    for (int i = 0; i < s.mesh.nodes_per_plane(); ++i) p[i] = 0.0;
    const double lhs = std::abs(quadratic(sys.theta, p, p));
    const double vn = v_norm(sys, p);
    EXPECT_GE(lhs, c * vn * vn * (1.0 - 1e-12));
  }
}

TEST(Assembly, AffineInChi)
{
  const Model s(testing::small_spec());
  const DerivedParams d = derive(testing::reference_physics());
  std::mt19937_64 rng(6);
  auto chi1 = testing::random_chi(s.ops.num_lateral(), rng);
  auto chi2 = testing::random_chi(s.ops.num_lateral(), rng);
  std::vector<double> sum(chi1.size()), zero(chi1.size(), 0.0);
  for (std::size_t i = 0; i < chi1.size(); ++i)
  {
    chi1[i] *= 0.5;
    chi2[i] *= 0.5;
    sum[i] = chi1[i] + chi2[i];
  }
  const Complex beta(0.5, 0.5);
  const Eigen::MatrixXcd lhs = dense(system_for(s, d, beta, chi1).full()) +
                               dense(system_for(s, d, beta, chi2).full()) -
                               dense(system_for(s, d, beta, zero).full());
  const Eigen::MatrixXcd rhs = dense(system_for(s, d, beta, sum).full());
  EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-12 * rhs.cwiseAbs().maxCoeff());
}

TEST(Assembly, SparsityFollowsElements)
{
  const Model s(testing::small_spec());
  const DerivedParams d = derive(testing::reference_physics());
  std::mt19937_64 rng(7);
  const AssembledSystem sys =
      system_for(s, d, Complex(0.5, 0.5), testing::random_chi(s.ops.num_lateral(), rng));
  std::set<std::pair<int, int>> adjacent;
  for (const auto &t : s.mesh.tets())
    for (int a : t)
      for (int b : t) adjacent.insert({a, b});
  const ComplexSparse full = sys.full();
  for (int col = 0; col < full.outerSize(); ++col)
    for (ComplexSparse::InnerIterator it(full, col); it; ++it)
      EXPECT_TRUE(adjacent.count({static_cast<int>(it.row()), col})) << it.row() << "," << col;
}

TEST(Assembly, VNorm)
{
  const Model s(testing::small_spec(1));
  const DerivedParams d = derive(testing::reference_physics());
  std::mt19937_64 rng(8);
  const auto n = s.mesh.num_nodes();
  const AssembledSystem zero_chi =
      system_for(s, d, Complex(0.5, 0.5), std::vector<double>(s.ops.num_lateral(), 0.0));
  EXPECT_EQ(v_norm(zero_chi, Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(n))), 0.0);
  EXPECT_NEAR(v_norm(zero_chi, Eigen::VectorXcd::Constant(static_cast<Eigen::Index>(n), 2.0)), 0.0,
              1e-12);

  const AssembledSystem sys =
      system_for(s, d, Complex(0.5, 0.5), std::vector<double>(s.ops.num_lateral(), 1.0));
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial)
  {
    Eigen::VectorXcd p = testing::random_vector(n, rng);
    for (int i = 0; i < s.mesh.nodes_per_plane(); ++i) p[i] = 0.0;
    const double h1 = std::sqrt(quadratic(s.ops.stiffness(), p, p).real());
    const double v = v_norm(sys, p);
    EXPECT_GE(v, h1 * (1.0 - 1e-14));
    worst = std::max(worst, v / h1);
  }
  EXPECT_TRUE(std::isfinite(worst));
}

TEST(Assembly, DirichletLifting)
{
  const Model s(testing::small_spec());
  const DerivedParams d = derive(testing::reference_physics());
  SourceData src = SourceData::zero(s.mesh.num_nodes());
  src.g.setConstant(Complex(1.0, 0.5));
  const LinerDensity chi = uniform_density(s.ops, 0.5);
  const AssembledSystem sys = assemble(s.ops, d, Complex(0.5, 0.5), chi, src);
  EXPECT_EQ(sys.num_free(), s.mesh.num_nodes() - s.mesh.nodes_per_plane());
  // rhs = -A(free, inflow) g
  Eigen::VectorXcd g_only = sys.dirichlet;
  const Eigen::VectorXcd expected = -sys.restrict_free(sys.full() * g_only);
  EXPECT_LT((expected - sys.rhs).norm(), 1e-13 * expected.norm());
  for (int i = 0; i < s.mesh.nodes_per_plane(); ++i)
  {
    EXPECT_EQ(sys.free_of_node[i], -1);
    EXPECT_EQ(sys.dirichlet[i], Complex(1.0, 0.5));
  }
}

TEST(Assembly, KOverrideRecomputesFlowWavenumber)
{
  const Model s(testing::small_spec());
  const DerivedParams d = derive(testing::reference_physics());
  const LinerDensity chi = uniform_density(s.ops, 0.5);
  const SourceData src = SourceData::zero(s.mesh.num_nodes());
  const AssembledSystem sys = assemble(s.ops, d, Complex(0.5, 0.5), chi, src, 2.0);
  EXPECT_DOUBLE_EQ(sys.derived.k0, 2.0);
  EXPECT_DOUBLE_EQ(sys.derived.k, 2.0 / d.M0);
  EXPECT_EQ(sys.coeffs.k0, 2.0);
}

TEST(Assembly, Errors)
{
  const Model s(testing::small_spec());
  const DerivedParams d = derive(testing::reference_physics());
  const SourceData src = SourceData::zero(s.mesh.num_nodes());
  LinerDensity chi = uniform_density(s.ops, 0.5);
  chi.values[0] = 1.5;
  EXPECT_THROW(assemble(s.ops, d, Complex(0.5, 0.5), chi, src), ValidationError);
  chi = uniform_density(s.ops, 0.5);
  chi.values.pop_back();
  EXPECT_THROW(assemble(s.ops, d, Complex(0.5, 0.5), chi, src), ValidationError);
  SourceData bad = src;
  bad.f.resize(3);
  EXPECT_THROW(assemble(s.ops, d, Complex(0.5, 0.5), uniform_density(s.ops, 0.5), bad),
               ValidationError);
}

}  // namespace
}  // namespace liner
