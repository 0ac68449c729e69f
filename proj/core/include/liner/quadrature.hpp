// SPDX-License-Identifier: Apache-2.0

#ifndef LINER_QUADRATURE_HPP
#define LINER_QUADRATURE_HPP

#include <array>
#include <vector>

namespace liner::quadrature
{

// Rules on reference simplices. Points are barycentric coordinates; weights sum to 1 so
// that a rule integrates over a physical simplex after scaling by its measure.
struct TetPoint
{
  std::array<double, 4> bary;
  double weight;
};

struct TriPoint
{
  std::array<double, 3> bary;
  double weight;
};

// Symmetric 3-point rule, exact for quadratics.
const std::vector<TriPoint> &triangle_degree2();

// Symmetric 4-point rule, exact for quadratics.
const std::vector<TetPoint> &tet_degree2();

// Collapsed (Duffy) Gauss-Legendre product rule with n points per direction; exact for
// polynomials of total degree 2n - 3 or less. Used for error norms.
std::vector<TetPoint> tet_collapsed_gauss(int n);

// Collapsed Gauss-Legendre rule on the triangle, n points per direction.
std::vector<TriPoint> triangle_collapsed_gauss(int n);

// Gauss-Legendre nodes and weights on [0, 1].
void gauss_legendre(int n, std::vector<double> &nodes, std::vector<double> &weights);

}  // namespace liner::quadrature

#endif  // LINER_QUADRATURE_HPP
