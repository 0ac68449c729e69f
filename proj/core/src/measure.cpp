// SPDX-License-Identifier: Apache-2.0

#include "liner/measure.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "liner/error.hpp"
#include "liner/quadrature.hpp"

namespace liner
{

namespace
{

using Point2 = Eigen::Vector2d;
using Polygon = std::vector<Point2>;

// Keeps the part of a convex polygon with sign * (p[axis] - bound) >= 0.
Polygon clip(const Polygon &poly, int axis, double bound, double sign)
{
  Polygon out;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i)
  {
    const Point2 &p = poly[i];
    const Point2 &q = poly[(i + 1) % n];
    const double dp = sign * (p[axis] - bound);
    const double dq = sign * (q[axis] - bound);
    if (dp >= 0.0)
    {
      out.push_back(p);
    }
    if ((dp >= 0.0) != (dq >= 0.0))
    {
      const double t = dp / (dp - dq);
      out.push_back(p + t * (q - p));
    }
  }
  return out;
}

Polygon clip_box(Polygon poly, double x0, double x1, double s0, double s1)
{
  poly = clip(poly, 0, x0, 1.0);
  if (poly.size() >= 3) poly = clip(poly, 0, x1, -1.0);
  if (poly.size() >= 3) poly = clip(poly, 1, s0, 1.0);
  if (poly.size() >= 3) poly = clip(poly, 1, s1, -1.0);
  return poly;
}

// Area and centroid via the shoelace formula.
std::pair<double, Point2> area_centroid(const Polygon &poly)
{
  double a = 0.0;
  Point2 c = Point2::Zero();
  for (std::size_t i = 0; i < poly.size(); ++i)
  {
    const Point2 &p = poly[i];
    const Point2 &q = poly[(i + 1) % poly.size()];
    const double w = p.x() * q.y() - q.x() * p.y();
    a += w;
    c += w * (p + q);
  }
  a *= 0.5;
  if (std::abs(a) < 1e-300)
  {
    return {0.0, poly.empty() ? c : poly.front()};
  }
  return {std::abs(a), c / (6.0 * a)};
}

}  // namespace

std::vector<CantorComponent::Interval> CantorComponent::intervals(double L) const
{
  const double a0 = x_begin.value_or(0.0);
  const double b0 = x_end.value_or(L);
  std::vector<Interval> current{{a0, b0, mass}};
  for (int m = 0; m < level; ++m)
  {
    std::vector<Interval> next;
    next.reserve(current.size() * 2);
    for (const auto &iv : current)
    {
      const double third = (iv.b - iv.a) / 3.0;
      next.push_back({iv.a, iv.a + third, 0.5 * iv.mass});
      next.push_back({iv.b - third, iv.b, 0.5 * iv.mass});
    }
    current = std::move(next);
  }
  return current;
}

double CantorComponent::limit_dimension() { return 1.0 + std::log(2.0) / std::log(3.0); }

double BoundaryMeasure::total_mass() const
{
  return std::accumulate(facet_mass_.begin(), facet_mass_.end(), 0.0);
}

double BoundaryMeasure::mass_of(FacetTag tag) const
{
  double m = 0.0;
  for (std::size_t f = 0; f < facet_mass_.size(); ++f)
  {
    if (facet_tag_[f] == tag)
    {
      m += facet_mass_[f];
    }
  }
  return m;
}

bool BoundaryMeasure::charges_whole_boundary() const
{
  return std::all_of(facet_mass_.begin(), facet_mass_.end(), [](double m) { return m > 0.0; });
}

BoundaryMeasure build_measure(const CylinderMesh &mesh, double surface_weight,
                              const std::optional<CantorComponent> &cantor)
{
  require(std::isfinite(surface_weight) && surface_weight >= 0.0,
          "measure surface_weight must be >= 0");
  const double L = mesh.spec().L;
  double cantor_mass = 0.0;
  if (cantor)
  {
    require(cantor->level >= 0 && cantor->level <= 12, "cantor level must be in [0, 12]");
    require(std::isfinite(cantor->mass) && cantor->mass >= 0.0, "cantor mass must be >= 0");
    const double a = cantor->x_begin.value_or(0.0);
    const double b = cantor->x_end.value_or(L);
    require(a >= 0.0 && b <= L && a < b, "cantor support must lie inside [0, L]");
    cantor_mass = cantor->mass;
  }

  const auto &facets = mesh.facets();
  const auto &nodes = mesh.nodes();
  double lateral_area = 0.0;
  for (int f : mesh.boundary_of(FacetTag::Lateral))
  {
    lateral_area += facets[f].area;
  }
  const double raw_lateral = surface_weight * lateral_area + cantor_mass;
  require(raw_lateral > 0.0, "boundary measure is identically zero on the lateral wall");

  BoundaryMeasure mu;
  mu.surface_weight_ = surface_weight;
  if (cantor && cantor->mass > 0.0)
  {
    mu.cantor_ = cantor;
  }
  mu.normalization_ = 1.0 / raw_lateral;
  mu.per_facet_.assign(facets.size(), {});
  mu.facet_tag_.resize(facets.size());
  for (std::size_t f = 0; f < facets.size(); ++f)
  {
    mu.facet_tag_[f] = facets[f].tag;
  }

  if (surface_weight > 0.0)
  {
    for (std::size_t f = 0; f < facets.size(); ++f)
    {
      const auto &facet = facets[f];
      const double scale = surface_weight * mu.normalization_ * facet.area;
      for (const auto &q : quadrature::triangle_degree2())
      {
        Vec3 x = Vec3::Zero();
        for (int a = 0; a < 3; ++a)
        {
          x += q.bary[a] * nodes[facet.nodes[a]];
        }
        mu.per_facet_[f].push_back({x, q.bary, q.weight * scale});
      }
    }
    mu.resolution_ = mesh.facet_scale();
  }

  if (mu.cantor_)
  {
    const auto intervals = mu.cantor_->intervals(L);
    const double perimeter = mesh.polygon_perimeter();
    const int cells = mesh.spec().planes() - 1;
    const auto &px = mesh.plane_x();
    std::vector<std::vector<int>> by_cell(cells);
    for (int f : mesh.boundary_of(FacetTag::Lateral))
    {
      by_cell[facets[f].axial_cell].push_back(f);
    }
    double band_width = 0.0;
    for (const auto &iv : intervals)
    {
      const double width = iv.b - iv.a;
      band_width = std::max(band_width, width);
      const double density = iv.mass * mu.normalization_ / (width * perimeter);
      const auto first = std::upper_bound(px.begin(), px.end(), iv.a) - px.begin() - 1;
      for (int c = std::max<int>(0, static_cast<int>(first)); c < cells && px[c] < iv.b; ++c)
      {
        for (int f : by_cell[c])
        {
          const auto &facet = facets[f];
          // Developed coordinates (x, s) with s the arc length along the polygon side.
          const Vec3 &origin = nodes[facet.nodes[0]];
          const Vec3 tangent = facet.normal.cross(Vec3::UnitX()).normalized();
          std::array<Point2, 3> tri;
          for (int a = 0; a < 3; ++a)
          {
            const Vec3 &p = nodes[facet.nodes[a]];
            tri[a] = Point2(p.x(), (p - origin).dot(tangent));
          }
          Eigen::Matrix2d edges;
          edges.col(0) = tri[1] - tri[0];
          edges.col(1) = tri[2] - tri[0];
          const Eigen::Matrix2d inverse = edges.inverse();

          const double smin = std::min({tri[0].y(), tri[1].y(), tri[2].y()});
          const double smax = std::max({tri[0].y(), tri[1].y(), tri[2].y()});
          const int strips = std::max(1, static_cast<int>(std::ceil((smax - smin) / width)));
          const double ds = (smax - smin) / strips;
          const Polygon poly(tri.begin(), tri.end());
          for (int k = 0; k < strips; ++k)
          {
            const double s0 = smin + k * ds;
            const double s1 = k + 1 == strips ? smax : s0 + ds;
            const Polygon piece = clip_box(poly, iv.a, iv.b, s0, s1);
            if (piece.size() < 3)
            {
              continue;
            }
            const auto [area, centroid] = area_centroid(piece);
            if (area <= 0.0)
            {
              continue;
            }
            const Eigen::Vector2d lambda = inverse * (centroid - tri[0]);
            const std::array<double, 3> bary{1.0 - lambda.x() - lambda.y(), lambda.x(),
                                             lambda.y()};
            Vec3 x = Vec3::Zero();
            for (int a = 0; a < 3; ++a)
            {
              x += bary[a] * nodes[facet.nodes[a]];
            }
            mu.per_facet_[f].push_back({x, bary, density * area});
          }
        }
      }
    }
    mu.resolution_ = std::max(mu.resolution_, std::sqrt(2.0) * band_width);
  }

  mu.facet_mass_.assign(facets.size(), 0.0);
  std::size_t count = 0;
  for (std::size_t f = 0; f < facets.size(); ++f)
  {
    for (const auto &q : mu.per_facet_[f])
    {
      mu.facet_mass_[f] += q.weight;
    }
    count += mu.per_facet_[f].size();
    if (facets[f].tag == FacetTag::Lateral)
    {
      mu.total_lateral_mass_ += mu.facet_mass_[f];
    }
  }

  std::vector<std::pair<double, std::pair<Vec3, double>>> flat;
  flat.reserve(count);
  for (const auto &points : mu.per_facet_)
  {
    for (const auto &q : points)
    {
      flat.push_back({q.point.x(), {q.point, q.weight}});
    }
  }
  std::stable_sort(flat.begin(), flat.end(),
                   [](const auto &a, const auto &b) { return a.first < b.first; });
  mu.sorted_x_.reserve(count);
  mu.sorted_points_.reserve(count);
  mu.sorted_weights_.reserve(count);
  for (const auto &[x, pw] : flat)
  {
    mu.sorted_x_.push_back(x);
    mu.sorted_points_.push_back(pw.first);
    mu.sorted_weights_.push_back(pw.second);
  }
  return mu;
}

double ball_mass(const BoundaryMeasure &mu, const Vec3 &center, double radius)
{
  const auto begin =
      std::lower_bound(mu.sorted_x_.begin(), mu.sorted_x_.end(), center.x() - radius);
  const auto end = std::upper_bound(begin, mu.sorted_x_.end(), center.x() + radius);
  const double r2 = radius * radius;
  double mass = 0.0;
  for (auto it = begin; it != end; ++it)
  {
    const auto i = static_cast<std::size_t>(it - mu.sorted_x_.begin());
    if ((mu.sorted_points_[i] - center).squaredNorm() <= r2)
    {
      mass += mu.sorted_weights_[i];
    }
  }
  return mass;
}

RegularityEstimate estimate_upper_regularity(const BoundaryMeasure &mu, double d, int samples,
                                             std::uint64_t seed)
{
  require(d > 1.0 && d <= 2.0, "regularity exponent d must lie in (1, 2]");
  require(samples >= 100, "regularity estimate needs at least 100 samples");

  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < mu.num_points(); ++i)
  {
    if (mu.point_weight(i) > 0.0)
    {
      support.push_back(i);
    }
  }
  require(!support.empty(), "measure has empty support");

  RegularityEstimate est;
  est.samples = samples;
  for (int j = 0;; ++j)
  {
    const double r = std::ldexp(1.0, -j);
    if (r <= mu.resolution())
    {
      break;
    }
    est.radii.push_back(r);
  }
  require(!est.radii.empty(), "measure resolution exceeds the unit radius");

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, support.size() - 1);
  for (int s = 0; s < samples; ++s)
  {
    const Vec3 &x = mu.point(support[pick(rng)]);
    for (double r : est.radii)
    {
      const double ratio = ball_mass(mu, x, r) / std::pow(r, d);
      if (ratio > est.A_hat)
      {
        est.A_hat = ratio;
        est.worst_point = x;
        est.worst_radius = r;
      }
    }
  }
  return est;
}

}  // namespace liner
