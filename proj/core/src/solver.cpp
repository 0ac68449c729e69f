// SPDX-License-Identifier: Apache-2.0

#include "liner/solver.hpp"

#include <chrono>
#include <cmath>
#include <cstring>
#include <limits>

#include <Eigen/Dense>

#ifdef LINER_HAVE_UMFPACK
#include <umfpack.h>
#else
#include <Eigen/SparseLU>
#endif

#include "liner/admissibility.hpp"
#include "liner/error.hpp"
#include "liner/parallel.hpp"
#include "liner/quadrature.hpp"

namespace liner
{

namespace
{

constexpr double kResidualTarget = 1e-10;
constexpr int kRefinementSteps = 4;

std::string format_rcond(double rcond)
{
  if (std::isnan(rcond))
  {
    return "condition estimate unavailable";
  }
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "reciprocal condition estimate %.3e", rcond);
  return buffer;
}

}  // namespace

#ifdef LINER_HAVE_UMFPACK

struct SparseFactorization::Impl
{
  ComplexSparse A;
  void *numeric = nullptr;
  double control[UMFPACK_CONTROL];
  double info[UMFPACK_INFO];
  double rcond = std::numeric_limits<double>::quiet_NaN();

  ~Impl()
  {
    if (numeric)
    {
      umfpack_zi_free_numeric(&numeric);
    }
  }

  void factor()
  {
    umfpack_zi_defaults(control);
    const int n = static_cast<int>(A.rows());
    const auto *Ax = reinterpret_cast<const double *>(A.valuePtr());
    void *symbolic = nullptr;
    int status = umfpack_zi_symbolic(n, n, A.outerIndexPtr(), A.innerIndexPtr(), Ax, nullptr,
                                     &symbolic, control, info);
    if (status != UMFPACK_OK)
    {
      throw NumericalError("sparse LU symbolic analysis failed (UMFPACK status " +
                           std::to_string(status) + ")");
    }
    status = umfpack_zi_numeric(A.outerIndexPtr(), A.innerIndexPtr(), Ax, nullptr, symbolic,
                                &numeric, control, info);
    umfpack_zi_free_symbolic(&symbolic);
    rcond = info[UMFPACK_RCOND];
    if (status != UMFPACK_OK)
    {
      throw NumericalError("sparse LU factorization failed (UMFPACK status " +
                           std::to_string(status) + "), " + format_rcond(rcond));
    }
  }

  Eigen::VectorXcd apply_inverse(const Eigen::VectorXcd &b, bool adjoint) const
  {
    Eigen::VectorXcd x(b.size());
    double local_info[UMFPACK_INFO];
    const int status = umfpack_zi_solve(
        adjoint ? UMFPACK_At : UMFPACK_A, A.outerIndexPtr(), A.innerIndexPtr(),
        reinterpret_cast<const double *>(A.valuePtr()), nullptr,
        reinterpret_cast<double *>(x.data()), nullptr, reinterpret_cast<const double *>(b.data()),
        nullptr, numeric, control, local_info);
    if (status != UMFPACK_OK)
    {
      throw NumericalError("sparse LU solve failed (UMFPACK status " + std::to_string(status) +
                           "), " + format_rcond(rcond));
    }
    return x;
  }
};

const char *SparseFactorization::backend() { return "umfpack"; }

#else

struct SparseFactorization::Impl
{
  ComplexSparse A;
  Eigen::SparseLU<ComplexSparse, Eigen::COLAMDOrdering<int>> lu;
  double rcond = std::numeric_limits<double>::quiet_NaN();

  void factor()
  {
    lu.compute(A);
    if (lu.info() != Eigen::Success)
    {
      throw NumericalError("sparse LU factorization failed: " + lu.lastErrorMessage() + ", " +
                           format_rcond(rcond));
    }
  }

  Eigen::VectorXcd apply_inverse(const Eigen::VectorXcd &b, bool adjoint) const
  {
    auto &solver = const_cast<Eigen::SparseLU<ComplexSparse, Eigen::COLAMDOrdering<int>> &>(lu);
    return adjoint ? Eigen::VectorXcd(solver.adjoint().solve(b)) : Eigen::VectorXcd(solver.solve(b));
  }
};

const char *SparseFactorization::backend() { return "eigen-sparselu"; }

#endif

SparseFactorization::SparseFactorization(const ComplexSparse &matrix) : impl_(new Impl)
{
  require(matrix.rows() == matrix.cols(), "factorization needs a square matrix");
  require(matrix.rows() > 0, "factorization of an empty matrix");
  impl_->A = matrix;
  impl_->A.makeCompressed();
  impl_->factor();
}

SparseFactorization::~SparseFactorization() = default;
SparseFactorization::SparseFactorization(SparseFactorization &&) noexcept = default;
SparseFactorization &SparseFactorization::operator=(SparseFactorization &&) noexcept = default;

double SparseFactorization::rcond() const { return impl_->rcond; }

Eigen::VectorXcd SparseFactorization::solve(const Eigen::VectorXcd &b, bool adjoint,
                                            double *residual) const
{
  require(b.size() == impl_->A.rows(), "right-hand side has the wrong dimension");
  const double bnorm = b.norm();
  if (bnorm == 0.0)
  {
    if (residual)
    {
      *residual = 0.0;
    }
    return Eigen::VectorXcd::Zero(b.size());
  }
  const auto apply = [&](const Eigen::VectorXcd &x) -> Eigen::VectorXcd {
    if (adjoint)
    {
      return impl_->A.adjoint() * x;
    }
    return impl_->A * x;
  };

  Eigen::VectorXcd x = impl_->apply_inverse(b, adjoint);
  Eigen::VectorXcd r = b - apply(x);
  double res = r.norm() / bnorm;
  for (int step = 0; step < kRefinementSteps && res > kResidualTarget; ++step)
  {
    const Eigen::VectorXcd candidate = x + impl_->apply_inverse(r, adjoint);
    const Eigen::VectorXcd rc = b - apply(candidate);
    const double rn = rc.norm() / bnorm;
    if (!(rn < res))
    {
      break;
    }
    x = candidate;
    r = rc;
    res = rn;
  }
  if (!(res <= kResidualTarget))
  {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.3e", res);
    throw NumericalError(std::string("relative residual ") + buffer +
                         " exceeds 1e-10 after refinement, " + format_rcond(impl_->rcond));
  }
  if (residual)
  {
    *residual = res;
  }
  return x;
}

std::uint64_t hash_chi(const std::vector<double> &chi)
{
  std::uint64_t h = 1469598103934665603ULL;
  for (double v : chi)
  {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &v, sizeof v);
    for (unsigned char b : bytes)
    {
      h ^= b;
      h *= 1099511628211ULL;
    }
  }
  return h;
}

std::optional<std::string> admissibility_warning(const AssembledSystem &system)
{
  const Complex beta = system.coeffs.beta_v;
  if (beta == Complex(0.0, 0.0) || is_admissible({beta, system.derived.r}))
  {
    return std::nullopt;
  }
  char buffer[160];
  std::snprintf(buffer, sizeof buffer,
                "beta_v = %g%+gi lies outside the admissible zone for r = %g; well-posedness "
                "is not guaranteed",
                beta.real(), beta.imag(), system.derived.r);
  return std::string(buffer);
}

SolutionField solve(const AssembledSystem &system, const SparseFactorization &lu)
{
  SolutionField field;
  field.k0 = system.derived.k0;
  field.chi_hash = hash_chi(system.chi);
  field.rcond = lu.rcond();
  if (auto w = admissibility_warning(system))
  {
    field.warnings.push_back(*w);
  }
  const Eigen::VectorXcd x = lu.solve(system.rhs, false, &field.residual);
  field.values = system.expand(x);
  return field;
}

SolutionField solve(const AssembledSystem &system)
{
  if (system.num_free() == 0)
  {
    SolutionField field;
    field.k0 = system.derived.k0;
    field.chi_hash = hash_chi(system.chi);
    field.values = system.dirichlet;
    return field;
  }
  const SparseFactorization lu(system.matrix);
  return solve(system, lu);
}

// ---------------------------------------------------------------------------------------
// Manufactured solutions

ExactField ExactField::plane_wave(double kappa)
{
  const Complex ik(0.0, kappa);
  ExactField e;
  e.value = [ik](const Vec3 &x) { return std::exp(ik * x.x()); };
  e.gradient = [ik](const Vec3 &x) {
    return Eigen::Vector3cd(ik * std::exp(ik * x.x()), 0.0, 0.0);
  };
  e.laplacian = [ik](const Vec3 &x) { return ik * ik * std::exp(ik * x.x()); };
  e.dxx = e.laplacian;
  return e;
}

ExactField ExactField::smooth()
{
  constexpr double a = 0.8;
  const Complex I(0.0, 1.0);
  const auto wave = [=](double x) { return std::exp(I * a * x); };
  const auto q = [=](const Vec3 &x) {
    return 1.0 + 0.3 * x.y() * x.y() + 0.4 * I * x.z() + 0.2 * x.y() * x.z();
  };
  ExactField e;
  e.value = [=](const Vec3 &x) { return wave(x.x()) * q(x); };
  e.gradient = [=](const Vec3 &x) {
    const Complex w = wave(x.x());
    return Eigen::Vector3cd(I * a * w * q(x), w * (0.6 * x.y() + 0.2 * x.z()),
                            w * (0.4 * I + 0.2 * x.y()));
  };
  e.laplacian = [=](const Vec3 &x) { return wave(x.x()) * (-a * a * q(x) + 0.6); };
  e.dxx = [=](const Vec3 &x) { return -a * a * wave(x.x()) * q(x); };
  return e;
}

ExactField ExactField::quadratic()
{
  const Complex I(0.0, 1.0);
  ExactField e;
  e.value = [=](const Vec3 &x) { return x.x() * x.x() + I * x.y() * x.z(); };
  e.gradient = [=](const Vec3 &x) {
    return Eigen::Vector3cd(2.0 * x.x(), I * x.z(), I * x.y());
  };
  e.laplacian = [](const Vec3 &) { return Complex(2.0, 0.0); };
  e.dxx = e.laplacian;
  return e;
}

ExactField ExactField::constant(Complex c)
{
  ExactField e;
  e.value = [c](const Vec3 &) { return c; };
  e.gradient = [](const Vec3 &) { return Eigen::Vector3cd::Zero().eval(); };
  e.laplacian = [](const Vec3 &) { return Complex(0.0, 0.0); };
  e.dxx = e.laplacian;
  return e;
}

namespace
{

Vec3 facet_point(const CylinderMesh &mesh, const BoundaryFacet &facet,
                 const std::array<double, 3> &bary)
{
  Vec3 x = Vec3::Zero();
  for (int a = 0; a < 3; ++a)
  {
    x += bary[a] * mesh.nodes()[facet.nodes[a]];
  }
  return x;
}

Complex dot_normal(const Eigen::Vector3cd &grad, const Vec3 &n)
{
  return grad.x() * n.x() + grad.y() * n.y() + grad.z() * n.z();
}

}  // namespace

ManufacturedCase manufactured_case(const FormOperators &ops, const DerivedParams &derived,
                                   Complex beta_v, const LinerDensity &chi,
                                   const ExactField &exact)
{
  require(chi.values.size() == ops.num_lateral(), "chi must have one value per lateral facet");
  const CylinderMesh &mesh = ops.mesh();
  const BoundaryMeasure &mu = ops.measure();
  const MyersCoefficients c = myers_coeffs(derived, beta_v);
  const auto n = static_cast<Eigen::Index>(mesh.num_nodes());
  const Complex I(0.0, 1.0);
  const double k0 = derived.k0, M0 = derived.M0;
  const Complex wall = I * derived.Y * (derived.Z0 / k0);
  const SymbolPolynomial symbol = operator_symbol(beta_v, k0, M0);

  ManufacturedCase mc;
  mc.sources = SourceData::zero(mesh.num_nodes());
  mc.exact.resize(n);
  mc.normal_derivative = Eigen::VectorXcd::Zero(n);
  mc.wall_operator = Eigen::VectorXcd::Zero(n);
  mc.outlet_data = Eigen::VectorXcd::Zero(n);
  Eigen::VectorXcd load = Eigen::VectorXcd::Zero(n);

  for (Eigen::Index i = 0; i < n; ++i)
  {
    const Vec3 &x = mesh.nodes()[static_cast<std::size_t>(i)];
    const Complex p = exact.value(x);
    const Complex px = exact.gradient(x).x();
    // D^2 p = k0^2 p - 2 i k0 M0 dx p - M0^2 dxx p
    mc.sources.f[i] = exact.laplacian(x) + k0 * k0 * p - 2.0 * I * k0 * M0 * px -
                      M0 * M0 * exact.dxx(x);
    mc.sources.g[i] = p;
    mc.exact[i] = p;
  }

  const auto &rule = quadrature::triangle_collapsed_gauss(4);
  const auto &facets = mesh.facets();

  for (int f : mesh.boundary_of(FacetTag::Out))
  {
    const auto &facet = facets[f];
    // Natural term from the volume integration by parts, against surface area.
    for (const auto &q : rule)
    {
      const Vec3 x = facet_point(mesh, facet, q.bary);
      const Complex val =
          (1.0 - M0 * M0) * exact.gradient(x).x() - I * k0 * M0 * exact.value(x);
      for (int a = 0; a < 3; ++a)
      {
        load[facet.nodes[a]] += q.weight * facet.area * val * q.bary[a];
      }
    }
    // Outlet impedance term against the measure.
    for (const auto &q : mu.quadrature(f))
    {
      const Complex val = I * derived.k * exact.value(q.point);
      for (int a = 0; a < 3; ++a)
      {
        load[facet.nodes[a]] += q.weight * val * q.bary[a];
      }
    }
    for (int a = 0; a < 3; ++a)
    {
      const Vec3 &x = mesh.nodes()[facet.nodes[a]];
      mc.outlet_data[facet.nodes[a]] =
          exact.gradient(x).x() + I * derived.k * exact.value(x);
    }
  }

  for (std::size_t e = 0; e < ops.num_lateral(); ++e)
  {
    const auto &fm = ops.lateral()[e];
    const auto &facet = facets[fm.facet];
    for (const auto &q : rule)
    {
      const Vec3 x = facet_point(mesh, facet, q.bary);
      const Complex dn = dot_normal(exact.gradient(x), facet.normal);
      for (int a = 0; a < 3; ++a)
      {
        load[facet.nodes[a]] += q.weight * facet.area * dn * q.bary[a];
      }
    }
    if (chi.values[e] > 0.0)
    {
      for (const auto &q : mu.quadrature(fm.facet))
      {
        const Complex p = exact.value(q.point);
        const Complex D1p = c.alpha * (c.c1 * p - I * M0 * exact.gradient(q.point).x());
        for (int a = 0; a < 3; ++a)
        {
          const Complex D1phi_conj =
              std::conj(c.alpha) * (std::conj(c.c1) * q.bary[a] + I * M0 * fm.dx(a));
          load[facet.nodes[a]] += wall * chi.values[e] * q.weight *
                                  (D1p * D1phi_conj - c.K2 * p * q.bary[a]);
        }
      }
    }
    for (int a = 0; a < 3; ++a)
    {
      const Vec3 &x = mesh.nodes()[facet.nodes[a]];
      const Eigen::Vector3cd g = exact.gradient(x);
      mc.normal_derivative[facet.nodes[a]] = dot_normal(g, facet.normal);
      mc.wall_operator[facet.nodes[a]] =
          symbol.c0 * exact.value(x) + symbol.c1 * g.x() + symbol.c2 * exact.dxx(x);
    }
  }

  mc.sources.load = load;
  return mc;
}

FieldErrors field_errors(const AssembledSystem &system, const Eigen::VectorXcd &u,
                         const ExactField &exact)
{
  const CylinderMesh &mesh = system.ops->mesh();
  require(static_cast<std::size_t>(u.size()) == mesh.num_nodes(),
          "field_errors expects a nodal vector of the mesh size");
  const auto rule = quadrature::tet_collapsed_gauss(4);
  const std::size_t ntet = mesh.num_tets();
  constexpr std::size_t chunk = 4096;
  const std::size_t chunks = (ntet + chunk - 1) / chunk;
  std::vector<double> l2(chunks, 0.0), semi(chunks, 0.0);
  parallel_for(chunks, [&](std::size_t c) {
    for (std::size_t t = c * chunk; t < std::min(ntet, (c + 1) * chunk); ++t)
    {
      const auto geo = tet_geometry(mesh, t);
      const auto &tet = mesh.tets()[t];
      Eigen::Vector3cd grad_h = Eigen::Vector3cd::Zero();
      for (int a = 0; a < 4; ++a)
      {
        grad_h += u[tet[a]] * geo.grad.row(a).transpose().cast<Complex>();
      }
      for (const auto &q : rule)
      {
        Vec3 x = Vec3::Zero();
        Complex uh = 0.0;
        for (int a = 0; a < 4; ++a)
        {
          x += q.bary[a] * mesh.nodes()[tet[a]];
          uh += q.bary[a] * u[tet[a]];
        }
        l2[c] += q.weight * geo.volume * std::norm(exact.value(x) - uh);
        semi[c] += q.weight * geo.volume * (exact.gradient(x) - grad_h).squaredNorm();
      }
    }
  });

  const MyersCoefficients &cf = system.coeffs;
  const Complex I(0.0, 1.0);
  double trace = 0.0;
  for (std::size_t e = 0; e < system.ops->num_lateral(); ++e)
  {
    if (system.chi[e] == 0.0)
    {
      continue;
    }
    const auto &fm = system.ops->lateral()[e];
    Complex dx_h = 0.0;
    for (int a = 0; a < 3; ++a)
    {
      dx_h += fm.dx(a) * u[fm.nodes[a]];
    }
    for (const auto &q : system.ops->measure().quadrature(fm.facet))
    {
      Complex uh = 0.0;
      for (int a = 0; a < 3; ++a)
      {
        uh += q.bary[a] * u[fm.nodes[a]];
      }
      const Complex err = exact.value(q.point) - uh;
      const Complex err_x = exact.gradient(q.point).x() - dx_h;
      trace += system.chi[e] * q.weight *
               std::norm(cf.alpha * (cf.c1 * err - I * cf.M0 * err_x));
    }
  }

  FieldErrors out;
  double l2_sum = 0.0, semi_sum = 0.0;
  for (std::size_t c = 0; c < chunks; ++c)
  {
    l2_sum += l2[c];
    semi_sum += semi[c];
  }
  out.l2 = std::sqrt(l2_sum);
  out.h1 = std::sqrt(l2_sum + semi_sum);
  out.v = std::sqrt(semi_sum + trace);
  return out;
}

double loglog_slope(const std::vector<double> &x, const std::vector<double> &y)
{
  require(x.size() == y.size() && x.size() >= 2, "slope needs at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
  {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

StudyResult convergence_study(const std::vector<MeshSpec> &ladder, const StudyCase &study)
{
  require(ladder.size() >= 2, "convergence study needs at least 2 refinement levels");
  require(static_cast<bool>(study.chi), "convergence study needs a chi function");
  StudyResult result;
  std::vector<double> h, l2, h1, v;
  for (const MeshSpec &spec : ladder)
  {
    const auto start = std::chrono::steady_clock::now();
    const CylinderMesh mesh = generate(spec);
    const BoundaryMeasure mu = build_measure(mesh, study.surface_weight, study.cantor);
    const FormOperators ops(mesh, mu);
    LinerDensity chi;
    for (const auto &fm : ops.lateral())
    {
      const auto &facet = mesh.facets()[fm.facet];
      const Vec3 centroid = (mesh.nodes()[facet.nodes[0]] + mesh.nodes()[facet.nodes[1]] +
                             mesh.nodes()[facet.nodes[2]]) /
                            3.0;
      chi.values.push_back(study.chi(centroid));
    }
    chi.gamma = liner_mass(ops, chi.values);
    const ManufacturedCase mc =
        manufactured_case(ops, study.derived, study.beta_v, chi, study.exact);
    const AssembledSystem sys = assemble(ops, study.derived, study.beta_v, chi, mc.sources);
    const SolutionField u = solve(sys);

    StudyRow row;
    row.spec = spec;
    row.nodes = mesh.num_nodes();
    row.h = mesh.max_edge_length();
    row.errors = field_errors(sys, u.values, study.exact);
    row.residual = u.residual;
    row.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.rows.push_back(row);
    h.push_back(row.h);
    l2.push_back(row.errors.l2);
    h1.push_back(row.errors.h1);
    v.push_back(row.errors.v);
  }
  result.l2_order = loglog_slope(h, l2);
  result.h1_order = loglog_slope(h, h1);
  result.v_order = loglog_slope(h, v);
  return result;
}

}  // namespace liner
