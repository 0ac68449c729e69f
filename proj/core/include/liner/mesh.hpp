// SPDX-License-Identifier: Apache-2.0

#ifndef LINER_MESH_HPP
#define LINER_MESH_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace liner
{

using Vec3 = Eigen::Vector3d;

// Parameters of the structured cylinder mesh (0,L) x B(0,R).
struct MeshSpec
{
  double L = 1.0;
  double R = 1.0;
  int n_axial = 2;  // number of cross-section planes along x
  int n_ring = 1;   // concentric rings of the disk triangulation
  int refinement_level = 0;

  // Each refinement level doubles the ring count and the axial cell count, so the
  // tetrahedron count grows by 8.
  int rings() const { return n_ring << refinement_level; }
  int planes() const { return (n_axial - 1) * (1 << refinement_level) + 1; }
  std::uint64_t hash() const;
};

enum class FacetTag : std::uint8_t
{
  In,
  Out,
  Lateral
};

std::string_view to_string(FacetTag tag);

struct BoundaryFacet
{
  std::array<int, 3> nodes;  // ordered so that the right-hand normal points outward
  FacetTag tag;
  Vec3 normal;  // outward unit normal; exactly (+-1,0,0) on In/Out, n_x == 0 on Lateral
  double area;
  int tet;          // owning tetrahedron
  int axial_cell;   // index of the axial slab [x_c, x_{c+1}] holding the facet
};

//
// Conforming tetrahedral mesh of a prism over a regular 6n-gon inscribed in the circle of
// radius R. The disk is triangulated ring by ring (ring j carries 6j nodes at radius
// R j / n); each prism is cut into 3 tetrahedra with diagonals chosen from the global node
// order, which keeps shared quadrilateral faces consistent.
//
class CylinderMesh
{
public:
  CylinderMesh() = default;

  const MeshSpec &spec() const { return spec_; }
  const std::vector<Vec3> &nodes() const { return nodes_; }
  const std::vector<std::array<int, 4>> &tets() const { return tets_; }
  const std::vector<BoundaryFacet> &facets() const { return facets_; }
  const std::vector<double> &plane_x() const { return plane_x_; }

  std::size_t num_nodes() const { return nodes_.size(); }
  std::size_t num_tets() const { return tets_.size(); }
  int nodes_per_plane() const { return nodes_per_plane_; }

  // Throws ValidationError for an unknown facet id.
  double facet_area(int facet_id) const;
  const std::vector<int> &boundary_of(FacetTag tag) const;

  // Nodes lying on x = 0, carrying the Dirichlet data.
  bool is_inflow_node(int node) const { return node < nodes_per_plane_; }

  double signed_volume(int tet) const;
  double polygon_area() const;
  double polygon_perimeter() const;
  double max_edge_length() const;
  // Largest boundary-facet diameter; the resolution scale of facet quadratures.
  double facet_scale() const;

  friend CylinderMesh generate(const MeshSpec &spec);
  friend CylinderMesh load_binary(const std::filesystem::path &path);
  friend void save_binary(const CylinderMesh &mesh, const std::filesystem::path &path);

private:
  void index_boundary();

  MeshSpec spec_;
  int nodes_per_plane_ = 0;
  std::vector<Vec3> nodes_;
  std::vector<std::array<int, 4>> tets_;
  std::vector<BoundaryFacet> facets_;
  std::vector<double> plane_x_;
  std::array<std::vector<int>, 3> by_tag_;
};

void validate(const MeshSpec &spec);

CylinderMesh generate(const MeshSpec &spec);

// Compact binary cache. generate_cached() looks for "mesh-<spec hash>.bin" in dir and
// writes it after generating when missing.
void save_binary(const CylinderMesh &mesh, const std::filesystem::path &path);
CylinderMesh load_binary(const std::filesystem::path &path);
CylinderMesh generate_cached(const MeshSpec &spec, const std::filesystem::path &dir);

}  // namespace liner

#endif  // LINER_MESH_HPP
