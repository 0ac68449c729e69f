// SPDX-License-Identifier: Apache-2.0

#include "liner/admissibility.hpp"

#include <cmath>
#include <ostream>

#include "liner/error.hpp"
#include "liner/io.hpp"
#include "liner/parallel.hpp"

namespace liner
{

K2Parts K2_parts(Complex beta_v, double k0)
{
  const double x = beta_v.real();
  const double y = beta_v.imag();
  const double mod2 = x * x + y * y;
  const double c = k0 * k0 / (4.0 * ((1.0 - x) * (1.0 - x) + y * y));
  return {c * (x * x - y * y - x * mod2), c * y * (2.0 * x - mod2)};
}

bool limit_membership(Complex beta_v, RatioLimit limit)
{
  const double x = beta_v.real();
  double y = beta_v.imag();
  if (x * x + y * y >= 1.0)
  {
    return false;
  }
  const double d1 = (x - 1.0) * (x - 1.0) + y * y;
  const bool in_open_d1 = d1 < 1.0;
  const bool in_closed_d1 = d1 <= 1.0;
  if (limit == RatioLimit::MinusInfinity)
  {
    y = -y;
  }
  if (y > 0.0)
  {
    return in_closed_d1;
  }
  if (y < 0.0)
  {
    return !in_open_d1;
  }
  return false;
}

bool is_admissible(const ZoneQuery &query)
{
  require(std::abs(query.beta_v) < 1.0,
          "|beta_v| >= 1: the admissible zone lies inside the unit disc");
  if (const auto *limit = std::get_if<RatioLimit>(&query.ratio))
  {
    return limit_membership(query.beta_v, *limit);
  }
  const double r = std::get<double>(query.ratio);
  require(std::isfinite(r), "admittance ratio must be finite; use RatioLimit for +-inf");
  if (query.beta_v == Complex(0.0, 0.0))
  {
    return true;
  }
  // The sign does not depend on k0 > 0.
  const K2Parts k2 = K2_parts(query.beta_v, 1.0);
  return k2.re - r * k2.im < 0.0;
}

double ZoneRaster::center(int index, int n)
{
  return static_cast<double>(2 * index + 1 - n) / static_cast<double>(n);
}

double ZoneRaster::fraction_member() const
{
  std::size_t count = 0;
  for (auto m : member)
  {
    count += m;
  }
  return member.empty() ? 0.0 : static_cast<double>(count) / static_cast<double>(member.size());
}

ZoneRaster rasterize_zone(Ratio ratio, int n)
{
  require(n >= 16, "raster resolution n must be >= 16");
  ZoneRaster raster;
  raster.n = n;
  raster.ratio = ratio;
  raster.member.assign(static_cast<std::size_t>(n) * n, 0);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t j) {
    const double y = ZoneRaster::center(static_cast<int>(j), n);
    for (int i = 0; i < n; ++i)
    {
      const double x = ZoneRaster::center(i, n);
      if (x * x + y * y >= 1.0)
      {
        continue;
      }
      raster.member[j * n + i] = is_admissible({Complex(x, y), ratio}) ? 1 : 0;
    }
  });
  return raster;
}

void write_zone_csv(const ZoneRaster &raster, std::ostream &out)
{
  out << "x,y,member\n";
  for (int j = 0; j < raster.n; ++j)
  {
    const double y = ZoneRaster::center(j, raster.n);
    for (int i = 0; i < raster.n; ++i)
    {
      out << format_double(ZoneRaster::center(i, raster.n)) << ',' << format_double(y) << ','
          << (raster.at(i, j) ? 1 : 0) << '\n';
    }
  }
}

}  // namespace liner
