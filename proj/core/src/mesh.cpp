// SPDX-License-Identifier: Apache-2.0

#include "liner/mesh.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <sstream>

#include "liner/error.hpp"

namespace liner
{

namespace
{

struct Disk
{
  std::vector<Eigen::Vector2d> points;
  std::vector<std::array<int, 3>> triangles;
};

int ring_offset(int j) { return j == 0 ? 0 : 1 + 3 * (j - 1) * j; }

int ring_node(int j, int k)
{
  if (j == 0)
  {
    return 0;
  }
  const int count = 6 * j;
  return ring_offset(j) + ((k % count) + count) % count;
}

double cross2(const Eigen::Vector2d &a, const Eigen::Vector2d &b, const Eigen::Vector2d &c)
{
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

Disk triangulate_disk(double R, int n)
{
  Disk disk;
  disk.points.emplace_back(0.0, 0.0);
  for (int j = 1; j <= n; ++j)
  {
    const double radius = R * static_cast<double>(j) / static_cast<double>(n);
    const int count = 6 * j;
    for (int k = 0; k < count; ++k)
    {
      const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) / count;
      disk.points.emplace_back(radius * std::cos(theta), radius * std::sin(theta));
    }
  }
  // The outermost ring sits exactly on the circle; pin the values that cos/sin may miss
  // by an ulp so that y^2 + z^2 = R^2 is as tight as possible.
  for (int k = 0; k < 6 * n; ++k)
  {
    auto &p = disk.points[ring_node(n, k)];
    p *= R / p.norm();
  }

  auto add = [&](int a, int b, int c) {
    if (cross2(disk.points[a], disk.points[b], disk.points[c]) < 0.0)
    {
      std::swap(b, c);
    }
    disk.triangles.push_back({a, b, c});
  };

  for (int k = 0; k < 6; ++k)
  {
    add(0, ring_node(1, k), ring_node(1, k + 1));
  }
  for (int j = 2; j <= n; ++j)
  {
    const int inner = j - 1;
    for (int s = 0; s < 6; ++s)
    {
      int ta = 0;
      int tb = 0;
      while (ta < inner || tb < j)
      {
        const int a = ring_node(inner, s * inner + ta);
        const int b = ring_node(j, s * j + tb);
        bool advance_outer;
        if (ta == inner)
        {
          advance_outer = true;
        }
        else if (tb == j)
        {
          advance_outer = false;
        }
        else
        {
          // Compare the angular position of the next node on each ring, as fractions of
          // the sector; integer cross-multiplication keeps the choice exact.
          advance_outer = (tb + 1) * inner <= (ta + 1) * j;
        }
        if (advance_outer)
        {
          add(a, b, ring_node(j, s * j + tb + 1));
          ++tb;
        }
        else
        {
          add(a, b, ring_node(inner, s * inner + ta + 1));
          ++ta;
        }
      }
    }
  }
  return disk;
}

double tet_volume(const Vec3 &a, const Vec3 &b, const Vec3 &c, const Vec3 &d)
{
  return (b - a).dot((c - a).cross(d - a)) / 6.0;
}

}  // namespace

std::uint64_t MeshSpec::hash() const
{
  // FNV-1a over the raw field bytes.
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&](const void *data, std::size_t size) {
    const auto *bytes = static_cast<const unsigned char *>(data);
    for (std::size_t i = 0; i < size; ++i)
    {
      h ^= bytes[i];
      h *= 1099511628211ull;
    }
  };
  mix(&L, sizeof L);
  mix(&R, sizeof R);
  mix(&n_axial, sizeof n_axial);
  mix(&n_ring, sizeof n_ring);
  mix(&refinement_level, sizeof refinement_level);
  return h;
}

std::string_view to_string(FacetTag tag)
{
  switch (tag)
  {
    case FacetTag::In:
      return "in";
    case FacetTag::Out:
      return "out";
    case FacetTag::Lateral:
      return "lateral";
  }
  return "?";
}

void validate(const MeshSpec &spec)
{
  require(std::isfinite(spec.L) && spec.L > 0.0, "mesh length L must be > 0");
  require(std::isfinite(spec.R) && spec.R > 0.0, "mesh radius R must be > 0");
  require(spec.n_axial >= 2, "mesh n_axial must be >= 2");
  require(spec.n_ring >= 1, "mesh n_ring must be >= 1");
  require(spec.refinement_level >= 0 && spec.refinement_level <= 8,
          "mesh refinement_level must be in [0, 8]");
}

CylinderMesh generate(const MeshSpec &spec)
{
  validate(spec);
  CylinderMesh mesh;
  mesh.spec_ = spec;

  const int n = spec.rings();
  const int planes = spec.planes();
  const Disk disk = triangulate_disk(spec.R, n);
  const int per_plane = static_cast<int>(disk.points.size());
  mesh.nodes_per_plane_ = per_plane;

  mesh.plane_x_.resize(planes);
  for (int p = 0; p < planes; ++p)
  {
    mesh.plane_x_[p] = spec.L * static_cast<double>(p) / static_cast<double>(planes - 1);
  }
  mesh.plane_x_.back() = spec.L;

  mesh.nodes_.reserve(static_cast<std::size_t>(planes) * per_plane);
  for (int p = 0; p < planes; ++p)
  {
    for (const auto &q : disk.points)
    {
      mesh.nodes_.emplace_back(mesh.plane_x_[p], q.x(), q.y());
    }
  }

  mesh.tets_.reserve(static_cast<std::size_t>(planes - 1) * disk.triangles.size() * 3);
  for (int p = 0; p + 1 < planes; ++p)
  {
    const int bottom = p * per_plane;
    const int top = (p + 1) * per_plane;
    for (auto tri : disk.triangles)
    {
      std::sort(tri.begin(), tri.end());
      const int a = bottom + tri[0], b = bottom + tri[1], c = bottom + tri[2];
      const int at = top + tri[0], bt = top + tri[1], ct = top + tri[2];
      for (std::array<int, 4> t : {std::array<int, 4>{a, b, c, ct},
                                   std::array<int, 4>{a, b, bt, ct},
                                   std::array<int, 4>{a, at, bt, ct}})
      {
        const auto &N = mesh.nodes_;
        if (tet_volume(N[t[0]], N[t[1]], N[t[2]], N[t[3]]) < 0.0)
        {
          std::swap(t[0], t[1]);
        }
        mesh.tets_.push_back(t);
      }
    }
  }

  // Boundary faces are those owned by exactly one tetrahedron.
  struct Face
  {
    std::array<int, 3> key;
    int tet;
    int opposite;
  };
  std::vector<Face> faces;
  faces.reserve(mesh.tets_.size() * 4);
  for (int t = 0; t < static_cast<int>(mesh.tets_.size()); ++t)
  {
    const auto &tet = mesh.tets_[t];
    for (int v = 0; v < 4; ++v)
    {
      std::array<int, 3> key{};
      int m = 0;
      for (int w = 0; w < 4; ++w)
      {
        if (w != v)
        {
          key[m++] = tet[w];
        }
      }
      std::sort(key.begin(), key.end());
      faces.push_back({key, t, tet[v]});
    }
  }
  std::sort(faces.begin(), faces.end(), [](const Face &x, const Face &y) {
    return x.key != y.key ? x.key < y.key : x.tet < y.tet;
  });

  const double dx = spec.L / static_cast<double>(planes - 1);
  for (std::size_t i = 0; i < faces.size();)
  {
    std::size_t j = i + 1;
    while (j < faces.size() && faces[j].key == faces[i].key)
    {
      ++j;
    }
    if (j - i == 1)
    {
      const Face &f = faces[i];
      BoundaryFacet facet;
      facet.nodes = f.key;
      facet.tet = f.tet;
      const auto &N = mesh.nodes_;
      Vec3 normal = (N[f.key[1]] - N[f.key[0]]).cross(N[f.key[2]] - N[f.key[0]]);
      facet.area = 0.5 * normal.norm();
      if (normal.dot(N[f.key[0]] - N[f.opposite]) < 0.0)
      {
        std::swap(facet.nodes[1], facet.nodes[2]);
        normal = -normal;
      }
      const int p0 = f.key[0] / per_plane;
      const int p1 = f.key[1] / per_plane;
      const int p2 = f.key[2] / per_plane;
      if (p0 == 0 && p1 == 0 && p2 == 0)
      {
        facet.tag = FacetTag::In;
        facet.normal = Vec3(-1.0, 0.0, 0.0);
        facet.axial_cell = 0;
      }
      else if (p0 == planes - 1 && p1 == planes - 1 && p2 == planes - 1)
      {
        facet.tag = FacetTag::Out;
        facet.normal = Vec3(1.0, 0.0, 0.0);
        facet.axial_cell = planes - 2;
      }
      else
      {
        facet.tag = FacetTag::Lateral;
        normal.x() = 0.0;
        facet.normal = normal.normalized();
        const double xmin =
            std::min({N[f.key[0]].x(), N[f.key[1]].x(), N[f.key[2]].x()});
        facet.axial_cell = std::min(planes - 2, static_cast<int>(std::lround(xmin / dx)));
      }
      mesh.facets_.push_back(facet);
    }
    i = j;
  }
  mesh.index_boundary();
  return mesh;
}

void CylinderMesh::index_boundary()
{
  for (auto &list : by_tag_)
  {
    list.clear();
  }
  for (int f = 0; f < static_cast<int>(facets_.size()); ++f)
  {
    by_tag_[static_cast<int>(facets_[f].tag)].push_back(f);
  }
}

double CylinderMesh::facet_area(int facet_id) const
{
  require(facet_id >= 0 && facet_id < static_cast<int>(facets_.size()),
          "unknown facet id " + std::to_string(facet_id));
  return facets_[facet_id].area;
}

const std::vector<int> &CylinderMesh::boundary_of(FacetTag tag) const
{
  return by_tag_[static_cast<int>(tag)];
}

double CylinderMesh::signed_volume(int tet) const
{
  const auto &t = tets_[tet];
  return tet_volume(nodes_[t[0]], nodes_[t[1]], nodes_[t[2]], nodes_[t[3]]);
}

double CylinderMesh::polygon_area() const
{
  const int sides = 6 * spec_.rings();
  return 0.5 * sides * spec_.R * spec_.R * std::sin(2.0 * std::numbers::pi / sides);
}

double CylinderMesh::polygon_perimeter() const
{
  const int sides = 6 * spec_.rings();
  return 2.0 * sides * spec_.R * std::sin(std::numbers::pi / sides);
}

double CylinderMesh::max_edge_length() const
{
  double h = 0.0;
  for (const auto &t : tets_)
  {
    for (int a = 0; a < 4; ++a)
    {
      for (int b = a + 1; b < 4; ++b)
      {
        h = std::max(h, (nodes_[t[a]] - nodes_[t[b]]).norm());
      }
    }
  }
  return h;
}

double CylinderMesh::facet_scale() const
{
  double h = 0.0;
  for (const auto &f : facets_)
  {
    for (int a = 0; a < 3; ++a)
    {
      h = std::max(h, (nodes_[f.nodes[a]] - nodes_[f.nodes[(a + 1) % 3]]).norm());
    }
  }
  return h;
}

namespace
{

constexpr char kMagic[8] = {'L', 'N', 'R', 'M', 'E', 'S', 'H', '1'};

template <typename T>
void put(std::ostream &out, const T &value)
{
  out.write(reinterpret_cast<const char *>(&value), sizeof(T));
}

template <typename T>
void get(std::istream &in, T &value)
{
  in.read(reinterpret_cast<char *>(&value), sizeof(T));
  if (!in)
  {
    throw ValidationError("truncated mesh cache file");
  }
}

}  // namespace

void save_binary(const CylinderMesh &mesh, const std::filesystem::path &path)
{
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), "cannot write mesh cache " + path.string());
  out.write(kMagic, sizeof kMagic);
  put(out, mesh.spec_.L);
  put(out, mesh.spec_.R);
  put(out, mesh.spec_.n_axial);
  put(out, mesh.spec_.n_ring);
  put(out, mesh.spec_.refinement_level);
  put(out, mesh.nodes_per_plane_);
  put(out, static_cast<std::uint64_t>(mesh.plane_x_.size()));
  for (double x : mesh.plane_x_)
  {
    put(out, x);
  }
  put(out, static_cast<std::uint64_t>(mesh.nodes_.size()));
  for (const auto &p : mesh.nodes_)
  {
    put(out, p.x());
    put(out, p.y());
    put(out, p.z());
  }
  put(out, static_cast<std::uint64_t>(mesh.tets_.size()));
  for (const auto &t : mesh.tets_)
  {
    put(out, t);
  }
  put(out, static_cast<std::uint64_t>(mesh.facets_.size()));
  for (const auto &f : mesh.facets_)
  {
    put(out, f.nodes);
    put(out, f.tag);
    put(out, f.normal.x());
    put(out, f.normal.y());
    put(out, f.normal.z());
    put(out, f.area);
    put(out, f.tet);
    put(out, f.axial_cell);
  }
}

CylinderMesh load_binary(const std::filesystem::path &path)
{
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), "cannot read mesh cache " + path.string());
  char magic[sizeof kMagic];
  in.read(magic, sizeof magic);
  require(in && std::memcmp(magic, kMagic, sizeof kMagic) == 0,
          "not a mesh cache file: " + path.string());
  CylinderMesh mesh;
  get(in, mesh.spec_.L);
  get(in, mesh.spec_.R);
  get(in, mesh.spec_.n_axial);
  get(in, mesh.spec_.n_ring);
  get(in, mesh.spec_.refinement_level);
  get(in, mesh.nodes_per_plane_);
  std::uint64_t count = 0;
  get(in, count);
  mesh.plane_x_.resize(count);
  for (double &x : mesh.plane_x_)
  {
    get(in, x);
  }
  get(in, count);
  mesh.nodes_.resize(count);
  for (auto &p : mesh.nodes_)
  {
    get(in, p.x());
    get(in, p.y());
    get(in, p.z());
  }
  get(in, count);
  mesh.tets_.resize(count);
  for (auto &t : mesh.tets_)
  {
    get(in, t);
  }
  get(in, count);
  mesh.facets_.resize(count);
  for (auto &f : mesh.facets_)
  {
    get(in, f.nodes);
    get(in, f.tag);
    get(in, f.normal.x());
    get(in, f.normal.y());
    get(in, f.normal.z());
    get(in, f.area);
    get(in, f.tet);
    get(in, f.axial_cell);
  }
  mesh.index_boundary();
  return mesh;
}

CylinderMesh generate_cached(const MeshSpec &spec, const std::filesystem::path &dir)
{
  validate(spec);
  std::ostringstream name;
  name << "mesh-" << std::hex << spec.hash() << ".bin";
  const auto path = dir / name.str();
  if (std::filesystem::exists(path))
  {
    return load_binary(path);
  }
  CylinderMesh mesh = generate(spec);
  std::filesystem::create_directories(dir);
  save_binary(mesh, path);
  return mesh;
}

}  // namespace liner
