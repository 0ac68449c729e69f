// SPDX-License-Identifier: Apache-2.0

#ifndef LINER_ADMISSIBILITY_HPP
#define LINER_ADMISSIBILITY_HPP

#include <cstdint>
#include <iosfwd>
#include <variant>
#include <vector>

#include "liner/params.hpp"

namespace liner
{

// Infinite admittance ratio r = Im(Y)/Re(Y), kept apart from finite doubles.
enum class RatioLimit
{
  PlusInfinity,
  MinusInfinity
};

using Ratio = std::variant<double, RatioLimit>;

struct ZoneQuery
{
  Complex beta_v;
  Ratio ratio;
};

struct K2Parts
{
  double re = 0.0;
  double im = 0.0;
};

// Real and imaginary parts of K^2 = k0^2 b^2 / (4(1-b)) written in x = Re b, y = Im b.
K2Parts K2_parts(Complex beta_v, double k0);

// Well-posedness test Re(K^2) - r Im(K^2) < 0 (strict), with beta_v = 0 always admissible.
// A RatioLimit ratio is answered by limit_membership().
bool is_admissible(const ZoneQuery &query);

// Membership in the limit of the admissible zone as r -> +inf or -inf. With D0 the open
// unit disc and D1 the open disc of radius 1 around 1:
//   +inf: D0 and ((Im > 0 and closure(D1)) or (Im < 0 and not D1))
//   -inf: D0 and ((Im > 0 and not D1) or (Im < 0 and closure(D1)))
bool limit_membership(Complex beta_v, RatioLimit limit);

//
// Membership raster over [-1,1]^2 sampled at cell centers. Row j holds y_j, column i
// holds x_i; centers are (2i + 1 - n)/n so that mirrored rows are exact negatives.
//
struct ZoneRaster
{
  int n = 0;
  Ratio ratio;
  std::vector<std::uint8_t> member;  // n*n, row-major in y

  static double center(int index, int n);
  bool at(int i, int j) const { return member[static_cast<std::size_t>(j) * n + i] != 0; }
  double fraction_member() const;
};

ZoneRaster rasterize_zone(Ratio ratio, int n);

// CSV with header "x,y,member" and n*n data rows.
void write_zone_csv(const ZoneRaster &raster, std::ostream &out);

}  // namespace liner

#endif  // LINER_ADMISSIBILITY_HPP
