// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <filesystem>
#include <map>
#include <set>

#include "liner/error.hpp"
#include "liner/mesh.hpp"
#include "support.hpp"

namespace liner
{
namespace
{

MeshSpec spec(double L, double R, int axial, int ring, int refine = 0)
{
  MeshSpec s;
  s.L = L;
  s.R = R;
  s.n_axial = axial;
  s.n_ring = ring;
  s.refinement_level = refine;
  return s;
}

TEST(Mesh, SmallestMeshCounts)
{
  const CylinderMesh mesh = generate(spec(1.0, 1.0, 2, 1));
  EXPECT_EQ(mesh.num_nodes(), 14u);
  EXPECT_EQ(mesh.nodes_per_plane(), 7);
  EXPECT_EQ(mesh.num_tets(), 18u);
  EXPECT_EQ(mesh.boundary_of(FacetTag::In).size(), 6u);
  EXPECT_EQ(mesh.boundary_of(FacetTag::Out).size(), 6u);
  EXPECT_EQ(mesh.boundary_of(FacetTag::Lateral).size(), 12u);
}

TEST(Mesh, VolumeAndAreasTelescopes)
{
  for (const MeshSpec &s : {spec(1.0, 1.0, 2, 1), spec(2.5, 0.7, 5, 3), spec(1.0, 0.5, 3, 2, 1)})
  {
    const CylinderMesh mesh = generate(s);
    double volume = 0.0;
    for (std::size_t t = 0; t < mesh.num_tets(); ++t)
    {
      const double v = mesh.signed_volume(static_cast<int>(t));
      EXPECT_GT(v, 0.0);
      volume += v;
    }
    const double prism = mesh.polygon_area() * s.L;
    EXPECT_NEAR(volume, prism, 1e-12 * prism);

    double out = 0.0, in = 0.0, lateral = 0.0;
    for (int f : mesh.boundary_of(FacetTag::Out)) out += mesh.facet_area(f);
    for (int f : mesh.boundary_of(FacetTag::In)) in += mesh.facet_area(f);
    for (int f : mesh.boundary_of(FacetTag::Lateral)) lateral += mesh.facet_area(f);
    EXPECT_NEAR(out, mesh.polygon_area(), 1e-12 * out);
    EXPECT_NEAR(in, mesh.polygon_area(), 1e-12 * in);
    const double side = mesh.polygon_perimeter() * s.L;
    EXPECT_NEAR(lateral, side, 1e-12 * side);
  }
}

TEST(Mesh, TagsPartitionAndNormals)
{
  const MeshSpec s = spec(2.0, 0.5, 4, 2);
  const CylinderMesh mesh = generate(s);
  std::set<int> seen;
  for (FacetTag tag : {FacetTag::In, FacetTag::Out, FacetTag::Lateral})
  {
    for (int f : mesh.boundary_of(tag))
    {
      EXPECT_TRUE(seen.insert(f).second);
      const BoundaryFacet &facet = mesh.facets()[f];
      EXPECT_EQ(facet.tag, tag);
      EXPECT_GT(facet.area, 0.0);
      EXPECT_NEAR(facet.normal.norm(), 1.0, 1e-14);
      for (int n : facet.nodes)
      {
        const Vec3 &x = mesh.nodes()[n];
        if (tag == FacetTag::In)
        {
          EXPECT_EQ(x.x(), 0.0);
        }
        else if (tag == FacetTag::Out)
        {
          EXPECT_EQ(x.x(), s.L);
        }
        else
        {
          EXPECT_NEAR(x.y() * x.y() + x.z() * x.z(), s.R * s.R, 1e-12);
        }
      }
      if (tag == FacetTag::In) EXPECT_EQ(facet.normal, Vec3(-1.0, 0.0, 0.0));
      if (tag == FacetTag::Out) EXPECT_EQ(facet.normal, Vec3(1.0, 0.0, 0.0));
      if (tag == FacetTag::Lateral)
      {
        EXPECT_EQ(facet.normal.x(), 0.0);
        // Outward: points away from the axis.
        const Vec3 &x = mesh.nodes()[facet.nodes[0]];
        EXPECT_GT(facet.normal.y() * x.y() + facet.normal.z() * x.z(), 0.0);
      }
    }
  }
  EXPECT_EQ(seen.size(), mesh.facets().size());
}

TEST(Mesh, Watertight)
{
  const CylinderMesh mesh = generate(spec(1.0, 1.0, 4, 3));
  std::map<std::array<int, 3>, int> count;
  for (const auto &t : mesh.tets())
  {
    for (int v = 0; v < 4; ++v)
    {
      std::array<int, 3> key{};
      int m = 0;
      for (int w = 0; w < 4; ++w)
        if (w != v) key[m++] = t[w];
      std::sort(key.begin(), key.end());
      ++count[key];
    }
  }
  std::size_t boundary = 0;
  for (const auto &[key, c] : count)
  {
    EXPECT_TRUE(c == 1 || c == 2);
    boundary += c == 1;
  }
  EXPECT_EQ(boundary, mesh.facets().size());
}

TEST(Mesh, RefinementHalvesFacetScale)
{
  const MeshSpec base = spec(2.0, 1.0, 5, 2);
  const CylinderMesh coarse = generate(base);
  MeshSpec fine_spec = base;
  fine_spec.refinement_level = 1;
  const CylinderMesh fine = generate(fine_spec);
  EXPECT_EQ(fine.num_tets(), 8 * coarse.num_tets());
  EXPECT_NEAR(fine.facet_scale() / coarse.facet_scale(), 0.5, 0.025);
  EXPECT_NEAR(fine.max_edge_length() / coarse.max_edge_length(), 0.5, 0.025);
}

TEST(Mesh, RejectsDegenerateSpecs)
{
  EXPECT_THROW(generate(spec(0.0, 1.0, 2, 1)), ValidationError);
  EXPECT_THROW(generate(spec(1.0, -1.0, 2, 1)), ValidationError);
  EXPECT_THROW(generate(spec(1.0, 1.0, 1, 1)), ValidationError);
  EXPECT_THROW(generate(spec(1.0, 1.0, 2, 0)), ValidationError);
  EXPECT_THROW(generate(spec(1.0, 1.0, 2, 1, -1)), ValidationError);
  const CylinderMesh mesh = generate(spec(1.0, 1.0, 2, 1));
  EXPECT_THROW(mesh.facet_area(-1), ValidationError);
  EXPECT_THROW(mesh.facet_area(static_cast<int>(mesh.facets().size())), ValidationError);
}

TEST(Mesh, BinaryCacheRoundTrip)
{
  const MeshSpec s = spec(1.5, 0.5, 3, 2);
  const auto dir = std::filesystem::temp_directory_path() / "liner_mesh_cache_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const CylinderMesh first = generate_cached(s, dir);
  const CylinderMesh second = generate_cached(s, dir);
  ASSERT_EQ(first.num_nodes(), second.num_nodes());
  ASSERT_EQ(first.facets().size(), second.facets().size());
  for (std::size_t i = 0; i < first.num_nodes(); ++i)
  {
    EXPECT_EQ(first.nodes()[i], second.nodes()[i]);
  }
  EXPECT_EQ(first.tets(), second.tets());
  for (std::size_t f = 0; f < first.facets().size(); ++f)
  {
    EXPECT_EQ(first.facets()[f].nodes, second.facets()[f].nodes);
    EXPECT_EQ(first.facets()[f].tag, second.facets()[f].tag);
  }
  EXPECT_EQ(first.boundary_of(FacetTag::Lateral), second.boundary_of(FacetTag::Lateral));
  std::filesystem::remove_all(dir);
}

TEST(Mesh, SpecHashDistinguishesFields)
{
  const MeshSpec a = spec(1.0, 1.0, 2, 1);
  MeshSpec b = a;
  b.refinement_level = 1;
  EXPECT_NE(a.hash(), b.hash());
  EXPECT_EQ(a.hash(), spec(1.0, 1.0, 2, 1).hash());
}

}  // namespace
}  // namespace liner
