// SPDX-License-Identifier: Apache-2.0

#ifndef LINER_MEASURE_HPP
#define LINER_MEASURE_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "liner/mesh.hpp"

namespace liner
{

//
// Pre-Cantor approximation of a singular measure on the lateral wall: the triadic Cantor
// construction of depth `level` applied to [x_begin, x_end], revolved around the x axis.
// Each of the 2^level bands carries mass * 2^-level, spread uniformly over its area.
//
struct CantorComponent
{
  int level = 6;
  double mass = 0.0;
  std::optional<double> x_begin;  // defaults to 0
  std::optional<double> x_end;    // defaults to L

  struct Interval
  {
    double a, b, mass;
  };
  std::vector<Interval> intervals(double L) const;

  // Hausdorff dimension of the revolved limit set, 1 + log 2 / log 3.
  static double limit_dimension();
};

struct QuadPoint
{
  Vec3 point;
  std::array<double, 3> bary;  // with respect to the facet's node order
  double weight;
};

//
// Boundary measure as a per-facet quadrature: weight w_s times the area measure on every
// boundary facet plus an optional Cantor component on the lateral wall, scaled so that the
// lateral wall has unit mass.
//
class BoundaryMeasure
{
public:
  double surface_weight() const { return surface_weight_; }
  const std::optional<CantorComponent> &cantor() const { return cantor_; }

  // Scale applied to the raw measure so that mu(lateral) = 1.
  double normalization() const { return normalization_; }
  double total_lateral_mass() const { return total_lateral_mass_; }
  double total_mass() const;
  double mass_of(FacetTag tag) const;

  const std::vector<QuadPoint> &quadrature(int facet) const { return per_facet_[facet]; }
  double facet_mass(int facet) const { return facet_mass_[facet]; }

  // Smallest length the quadrature resolves: the facet scale for the area part, the band
  // width for the Cantor part, whichever is larger among the parts present.
  double resolution() const { return resolution_; }

  // Every boundary facet carries mass; false for a pure Cantor measure.
  bool charges_whole_boundary() const;

  std::size_t num_points() const { return sorted_x_.size(); }
  const Vec3 &point(std::size_t i) const { return sorted_points_[i]; }
  double point_weight(std::size_t i) const { return sorted_weights_[i]; }

  friend BoundaryMeasure build_measure(const CylinderMesh &mesh, double surface_weight,
                                       const std::optional<CantorComponent> &cantor);
  friend double ball_mass(const BoundaryMeasure &measure, const Vec3 &center, double radius);

private:
  double surface_weight_ = 1.0;
  std::optional<CantorComponent> cantor_;
  double normalization_ = 1.0;
  double total_lateral_mass_ = 0.0;
  double resolution_ = 0.0;
  std::vector<std::vector<QuadPoint>> per_facet_;
  std::vector<double> facet_mass_;
  std::vector<FacetTag> facet_tag_;

  // Flattened copy sorted by x for ball queries.
  std::vector<double> sorted_x_;
  std::vector<Vec3> sorted_points_;
  std::vector<double> sorted_weights_;
};

BoundaryMeasure build_measure(const CylinderMesh &mesh, double surface_weight,
                              const std::optional<CantorComponent> &cantor = std::nullopt);

// Sum of quadrature weights within the closed Euclidean ball.
double ball_mass(const BoundaryMeasure &measure, const Vec3 &center, double radius);

struct RegularityEstimate
{
  double A_hat = 0.0;
  Vec3 worst_point = Vec3::Zero();
  double worst_radius = 0.0;
  int samples = 0;
  std::vector<double> radii;
};

// Sampled sup of mu(B(x, r)) / r^d over support points x (drawn with a fixed seed) and
// dyadic radii r = 2^-j in (resolution, 1].
RegularityEstimate estimate_upper_regularity(const BoundaryMeasure &measure, double d,
                                             int samples, std::uint64_t seed = 0);

}  // namespace liner

#endif  // LINER_MEASURE_HPP
