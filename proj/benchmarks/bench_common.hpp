// SPDX-License-Identifier: Apache-2.0

#ifndef LINER_BENCH_COMMON_HPP
#define LINER_BENCH_COMMON_HPP

#include "liner/assembly.hpp"
#include "liner/measure.hpp"
#include "liner/mesh.hpp"
#include "liner/params.hpp"

namespace liner::bench
{

inline PhysicalParams physics()
{
  PhysicalParams p;
  p.omega = 340.0;
  p.c0 = 340.0;
  p.u0 = 68.0;
  p.Z = Complex(2.0, -2.0);
  p.beta_v = Complex(0.5, 0.5);
  return p;
}

inline MeshSpec duct(int refinement)
{
  MeshSpec s;
  s.L = 2.0;
  s.R = 0.5;
  s.n_axial = 5;
  s.n_ring = 2;
  s.refinement_level = refinement;
  return s;
}

struct Model
{
  CylinderMesh mesh;
  BoundaryMeasure measure;
  FormOperators ops;

  explicit Model(const MeshSpec &spec)
      : mesh(generate(spec)), measure(build_measure(mesh, 1.0)), ops(mesh, measure)
  {
  }
};

inline SourceData inflow(const CylinderMesh &mesh)
{
  SourceData s = SourceData::zero(mesh.num_nodes());
  s.g.setOnes();
  return s;
}

}  // namespace liner::bench

#endif
