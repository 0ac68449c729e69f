// SPDX-License-Identifier: Apache-2.0

#ifndef LINER_PARAMS_HPP
#define LINER_PARAMS_HPP

#include <complex>
#include <optional>
#include <vector>

namespace liner
{

using Complex = std::complex<double>;

//
// Physical constants of the duct problem. All quantities are SI except Z0, which is a
// dimensionless scaling of the fluid impedance.
//
struct PhysicalParams
{
  double omega = 0.0;       // angular frequency [rad/s]
  double u0 = 0.0;          // mean flow speed along x [m/s]
  double c0 = 0.0;          // sound speed [m/s]
  double Z0 = 1.0;          // fluid impedance scaling
  Complex Z{1.0, 0.0};      // liner impedance, Re(Z) > 0
  Complex beta_v{0.0, 0.0}; // viscosity-transfer parameter, |beta_v| < 1
};

struct DerivedParams
{
  double M0 = 0.0;  // Mach number u0/c0
  double k0 = 0.0;  // acoustic wavenumber omega/c0
  double k = 0.0;   // flow wavenumber omega/u0
  double Z0 = 1.0;
  Complex Y;        // admittance 1/Z
  double r = 0.0;   // Im(Y)/Re(Y)
};

// Data of the factorization D(D + i M0 beta_v dx) = D1^2 - K^2 with
// D1 = alpha (c1 - i M0 dx).
struct MyersCoefficients
{
  Complex alpha;
  Complex c1;
  Complex K2;
  Complex beta_v;
  double k0 = 0.0;
  double M0 = 0.0;
};

// Checks the invariants of PhysicalParams (positivity, subsonic flow, Re(Z) > 0,
// |beta_v| < 1) and throws ValidationError naming the first violated one.
void validate(const PhysicalParams &params);

DerivedParams derive(const PhysicalParams &params);

// Replaces the acoustic wavenumber with M0 held fixed; k is recomputed as k0/M0 so that
// k0 = k M0 keeps holding. Passing the current k0 returns the input unchanged.
DerivedParams with_wavenumber(const DerivedParams &derived, double k0);

// Replaces the admittance (and hence r) by 1/Z.
DerivedParams with_impedance(const DerivedParams &derived, Complex Z);

MyersCoefficients myers_coeffs(const DerivedParams &derived, Complex beta_v);

// K^2 evaluated through the real/imaginary expansion
//   K^2 = k0^2 (x^2 - y^2 - x|b|^2 + i y (2x - |b|^2)) / (4 |1 - b|^2),
// an algebraic route independent of k0^2 b^2 / (4 (1 - b)).
Complex K2_expanded(Complex beta_v, double k0);

// Coefficients {constant, first order, second order} of a quadratic polynomial in the
// formal symbol dx.
struct SymbolPolynomial
{
  Complex c0, c1, c2;
};

// Left side D(D + i M0 beta_v dx) expanded in dx.
SymbolPolynomial operator_symbol(Complex beta_v, double k0, double M0);

// Right side D1^2 - K^2 expanded in dx, using the stored coefficients.
SymbolPolynomial factorized_symbol(const MyersCoefficients &coeffs);

// True iff both expansions agree coefficient-wise to relative 1e-12.
bool verify_decomposition(const MyersCoefficients &coeffs, const DerivedParams &derived);

//
// Piecewise-linear impedance table over k0, or a constant impedance when empty. Used by
// wavenumber sweeps; values outside the table range are clamped to the end points.
//
class ImpedanceModel
{
public:
  struct Sample
  {
    double k0;
    Complex Z;
  };

  ImpedanceModel() = default;
  explicit ImpedanceModel(Complex constant);
  explicit ImpedanceModel(std::vector<Sample> table);

  bool is_constant() const { return table_.empty(); }
  Complex at(double k0) const;

private:
  Complex constant_{1.0, 0.0};
  std::vector<Sample> table_;
};

}  // namespace liner

#endif  // LINER_PARAMS_HPP
