// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "liner/admissibility.hpp"
#include "liner/error.hpp"
#include "support.hpp"

namespace liner
{
namespace
{

TEST(Admissibility, K2PartsMatchDirectFormula)
{
  std::mt19937_64 rng(5);
  for (int i = 0; i < 1000; ++i)
  {
    const Complex b = testing::random_in_disc(rng);
    const double k0 = 0.3 + 0.01 * i;
    const Complex direct = k0 * k0 * b * b / (4.0 * (1.0 - b));
    const K2Parts parts = K2_parts(b, k0);
    const double scale = std::max(1.0, std::abs(direct));
    EXPECT_NEAR(parts.re, direct.real(), 1e-12 * scale);
    EXPECT_NEAR(parts.im, direct.imag(), 1e-12 * scale);
  }
}

TEST(Admissibility, ZeroIsAlwaysAdmissible)
{
  for (double r : {-1e6, -3.0, 0.0, 1.0, 42.0})
  {
    EXPECT_TRUE(is_admissible({Complex(0.0, 0.0), r}));
  }
}

TEST(Admissibility, RealSegmentIsNeverAdmissible)
{
  // On the real axis Im K^2 = 0 and Re K^2 = c x^2 (1 - x) >= 0.
  for (double r : {-50.0, -1.0, 0.0, 1.0, 50.0})
  {
    for (int i = 1; i < 200; ++i)
    {
      const double x = -0.995 + i * 0.01;
      if (x == 0.0)
      {
        continue;
      }
      EXPECT_FALSE(is_admissible({Complex(x, 0.0), r})) << x;
    }
  }
}

TEST(Admissibility, ConjugateSymmetry)
{
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> ratio(-100.0, 100.0);
  for (int i = 0; i < 5000; ++i)
  {
    const Complex b = testing::random_in_disc(rng);
    const double r = ratio(rng);
    EXPECT_EQ(is_admissible({b, r}), is_admissible({std::conj(b), -r}));
  }
}

TEST(Admissibility, RejectsOutsideDiscAndInfiniteDouble)
{
  EXPECT_THROW(is_admissible({Complex(1.0, 0.0), 1.0}), ValidationError);
  EXPECT_THROW(is_admissible({Complex(0.6, 0.8), 1.0}), ValidationError);
  EXPECT_THROW(is_admissible({Complex(0.1, 0.1), std::numeric_limits<double>::infinity()}),
               ValidationError);
}

TEST(Admissibility, LimitMembershipMatchesLargeRatios)
{
  std::mt19937_64 rng(13);
  int agree_plus = 0, agree_minus = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i)
  {
    const Complex b = testing::random_in_disc(rng);
    agree_plus += is_admissible({b, 1e9}) == limit_membership(b, RatioLimit::PlusInfinity);
    agree_minus += is_admissible({b, -1e9}) == limit_membership(b, RatioLimit::MinusInfinity);
  }
  EXPECT_GE(agree_plus, n - 5);
  EXPECT_GE(agree_minus, n - 5);
}

TEST(Admissibility, LimitDispatch)
{
  const Complex b(0.5, 0.4);  // inside D1 with Im > 0
  EXPECT_TRUE(is_admissible({b, RatioLimit::PlusInfinity}));
  EXPECT_FALSE(is_admissible({b, RatioLimit::MinusInfinity}));
  EXPECT_TRUE(is_admissible({std::conj(b), RatioLimit::MinusInfinity}));
}

TEST(Admissibility, RasterSymmetryAndCsv)
{
  const ZoneRaster plus = rasterize_zone(1.0, 64);
  const ZoneRaster minus = rasterize_zone(-1.0, 64);
  for (int j = 0; j < 64; ++j)
  {
    EXPECT_EQ(ZoneRaster::center(63 - j, 64), -ZoneRaster::center(j, 64));
    for (int i = 0; i < 64; ++i)
    {
      EXPECT_EQ(plus.at(i, j), minus.at(i, 63 - j));
    }
  }
  EXPECT_GT(plus.fraction_member(), 0.0);
  EXPECT_LT(plus.fraction_member(), 1.0);

  std::ostringstream csv;
  write_zone_csv(plus, csv);
  std::istringstream lines(csv.str());
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "x,y,member");
  int rows = 0;
  while (std::getline(lines, line))
  {
    ++rows;
  }
  EXPECT_EQ(rows, 64 * 64);
  EXPECT_THROW(rasterize_zone(1.0, 8), ValidationError);
}

}  // namespace
}  // namespace liner
