// SPDX-License-Identifier: Apache-2.0

#include "liner/params.hpp"

#include <algorithm>
#include <cmath>

#include "liner/error.hpp"

namespace liner
{

namespace
{

constexpr Complex I{0.0, 1.0};

bool close_rel(Complex a, Complex b, double tol)
{
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) <= tol * scale;
}

}  // namespace

void validate(const PhysicalParams &p)
{
  require(std::isfinite(p.omega) && p.omega > 0.0, "omega must be > 0");
  require(std::isfinite(p.u0) && p.u0 > 0.0, "u0 must be > 0");
  require(std::isfinite(p.c0) && p.c0 > 0.0, "c0 must be > 0");
  require(std::isfinite(p.Z0) && p.Z0 > 0.0, "Z0 must be > 0");
  require(p.u0 < p.c0, "Mach number M0 = u0/c0 must be < 1 (subsonic flow required for "
                       "coercivity); got u0 >= c0");
  require(std::isfinite(p.Z.real()) && std::isfinite(p.Z.imag()) && p.Z.real() > 0.0,
          "liner impedance must satisfy Re(Z) > 0");
  require(std::abs(p.beta_v) < 1.0, "|beta_v| >= 1: well-posedness requires |beta_v| < 1");
}

DerivedParams derive(const PhysicalParams &p)
{
  validate(p);
  DerivedParams d;
  d.M0 = p.u0 / p.c0;
  d.k0 = p.omega / p.c0;
  d.k = p.omega / p.u0;
  d.Z0 = p.Z0;
  d.Y = 1.0 / p.Z;
  d.r = d.Y.imag() / d.Y.real();
  return d;
}

DerivedParams with_wavenumber(const DerivedParams &derived, double k0)
{
  require(std::isfinite(k0) && k0 > 0.0, "wavenumber k0 must be > 0");
  if (k0 == derived.k0)
  {
    return derived;
  }
  DerivedParams d = derived;
  d.k0 = k0;
  d.k = k0 / d.M0;
  return d;
}

DerivedParams with_impedance(const DerivedParams &derived, Complex Z)
{
  require(Z.real() > 0.0, "liner impedance must satisfy Re(Z) > 0");
  DerivedParams d = derived;
  d.Y = 1.0 / Z;
  d.r = d.Y.imag() / d.Y.real();
  return d;
}

MyersCoefficients myers_coeffs(const DerivedParams &derived, Complex beta_v)
{
  require(std::abs(beta_v) < 1.0, "|beta_v| >= 1: well-posedness requires |beta_v| < 1");
  const double k0 = derived.k0;
  const Complex one_minus = 1.0 - beta_v;

  MyersCoefficients c;
  // Principal root has arg in (-pi/2, pi/2]; flip into [0, pi).
  c.alpha = std::sqrt(one_minus);
  if (std::arg(c.alpha) < 0.0)
  {
    c.alpha = -c.alpha;
  }
  c.c1 = 0.5 * k0 * (2.0 - beta_v) / one_minus;
  c.K2 = k0 * k0 * beta_v * beta_v / (4.0 * one_minus);
  c.beta_v = beta_v;
  c.k0 = k0;
  c.M0 = derived.M0;
  return c;
}

Complex K2_expanded(Complex beta_v, double k0)
{
  const double x = beta_v.real();
  const double y = beta_v.imag();
  const double mod2 = x * x + y * y;
  const double denom = 4.0 * std::norm(1.0 - beta_v);
  const double scale = k0 * k0 / denom;
  return {scale * (x * x - y * y - x * mod2), scale * y * (2.0 * x - mod2)};
}

SymbolPolynomial operator_symbol(Complex beta_v, double k0, double M0)
{
  // D = k0 - i M0 dx, so D(D + i M0 b dx) = k0^2 - i k0 M0 (2 - b) dx - M0^2 (1 - b) dx^2.
  return {Complex(k0 * k0, 0.0), -I * k0 * M0 * (2.0 - beta_v),
          -M0 * M0 * (1.0 - beta_v)};
}

SymbolPolynomial factorized_symbol(const MyersCoefficients &c)
{
  const Complex a2 = c.alpha * c.alpha;
  return {a2 * c.c1 * c.c1 - c.K2, -2.0 * I * a2 * c.c1 * c.M0, -a2 * c.M0 * c.M0};
}

bool verify_decomposition(const MyersCoefficients &coeffs, const DerivedParams &derived)
{
  constexpr double tol = 1e-12;
  const SymbolPolynomial lhs = operator_symbol(coeffs.beta_v, derived.k0, derived.M0);
  MyersCoefficients c = coeffs;
  c.M0 = derived.M0;
  const SymbolPolynomial rhs = factorized_symbol(c);
  return close_rel(lhs.c0, rhs.c0, tol) && close_rel(lhs.c1, rhs.c1, tol) &&
         close_rel(lhs.c2, rhs.c2, tol);
}

ImpedanceModel::ImpedanceModel(Complex constant) : constant_(constant)
{
  require(constant.real() > 0.0, "liner impedance must satisfy Re(Z) > 0");
}

ImpedanceModel::ImpedanceModel(std::vector<Sample> table) : table_(std::move(table))
{
  require(!table_.empty(), "impedance table is empty");
  std::sort(table_.begin(), table_.end(),
            [](const Sample &a, const Sample &b) { return a.k0 < b.k0; });
  for (std::size_t i = 0; i < table_.size(); ++i)
  {
    require(table_[i].Z.real() > 0.0, "impedance table entry with Re(Z) <= 0");
    require(i == 0 || table_[i].k0 > table_[i - 1].k0, "impedance table has duplicate k0");
  }
}

Complex ImpedanceModel::at(double k0) const
{
  if (table_.empty())
  {
    return constant_;
  }
  if (k0 <= table_.front().k0)
  {
    return table_.front().Z;
  }
  if (k0 >= table_.back().k0)
  {
    return table_.back().Z;
  }
  const auto hi = std::upper_bound(table_.begin(), table_.end(), k0,
                                   [](double v, const Sample &s) { return v < s.k0; });
  const auto lo = hi - 1;
  const double t = (k0 - lo->k0) / (hi->k0 - lo->k0);
  return (1.0 - t) * lo->Z + t * hi->Z;
}

}  // namespace liner
