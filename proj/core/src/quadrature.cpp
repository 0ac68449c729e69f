// SPDX-License-Identifier: Apache-2.0

#include "liner/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace liner::quadrature
{

const std::vector<TriPoint> &triangle_degree2()
{
  static const std::vector<TriPoint> rule = {
      {{2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0}, 1.0 / 3.0},
      {{1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0}, 1.0 / 3.0},
      {{1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0}, 1.0 / 3.0},
  };
  return rule;
}

const std::vector<TetPoint> &tet_degree2()
{
  static const std::vector<TetPoint> rule = [] {
    const double a = (5.0 + 3.0 * std::sqrt(5.0)) / 20.0;
    const double b = (5.0 - std::sqrt(5.0)) / 20.0;
    return std::vector<TetPoint>{
        {{a, b, b, b}, 0.25},
        {{b, a, b, b}, 0.25},
        {{b, b, a, b}, 0.25},
        {{b, b, b, a}, 0.25},
    };
  }();
  return rule;
}

void gauss_legendre(int n, std::vector<double> &nodes, std::vector<double> &weights)
{
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < n; ++i)
  {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it)
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k)
      {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      const double pn = n == 0 ? 1.0 : p1;
      dp = n * (x * pn - p0) / (x * x - 1.0);
      const double step = pn / dp;
      x -= step;
      if (std::abs(step) < 1e-16)
      {
        break;
      }
    }
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k)
      {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
    }
    nodes[i] = 0.5 * (1.0 - x);
    weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
}

std::vector<TetPoint> tet_collapsed_gauss(int n)
{
  std::vector<double> g, w;
  gauss_legendre(n, g, w);
  std::vector<TetPoint> rule;
  rule.reserve(static_cast<std::size_t>(n) * n * n);
  // (u, v, t) in [0,1]^3 -> x = u, y = v (1 - u), z = t (1 - u)(1 - v);
  // jacobian (1 - u)^2 (1 - v); reference volume 1/6.
  for (int i = 0; i < n; ++i)
  {
    for (int j = 0; j < n; ++j)
    {
      for (int k = 0; k < n; ++k)
      {
        const double u = g[i], v = g[j], t = g[k];
        const double x = u;
        const double y = v * (1.0 - u);
        const double z = t * (1.0 - u) * (1.0 - v);
        const double jac = (1.0 - u) * (1.0 - u) * (1.0 - v);
        rule.push_back({{1.0 - x - y - z, x, y, z}, 6.0 * w[i] * w[j] * w[k] * jac});
      }
    }
  }
  return rule;
}

std::vector<TriPoint> triangle_collapsed_gauss(int n)
{
  std::vector<double> g, w;
  gauss_legendre(n, g, w);
  std::vector<TriPoint> rule;
  rule.reserve(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
  {
    for (int j = 0; j < n; ++j)
    {
      const double x = g[i];
      const double y = g[j] * (1.0 - g[i]);
      rule.push_back({{1.0 - x - y, x, y}, 2.0 * w[i] * w[j] * (1.0 - g[i])});
    }
  }
  return rule;
}

}  // namespace liner::quadrature
