// SPDX-License-Identifier: Apache-2.0

#ifndef LINER_TESTS_SUPPORT_HPP
#define LINER_TESTS_SUPPORT_HPP

#include <random>

#include "liner/assembly.hpp"
#include "liner/measure.hpp"
#include "liner/mesh.hpp"
#include "liner/params.hpp"

namespace liner::testing
{

// M0 = 0.2, k0 = 1, Z = 2 - 2i (r = 1), beta_v = 0.5 + 0.5i, which is admissible.
inline PhysicalParams reference_physics()
{
  PhysicalParams p;
  p.omega = 340.0;
  p.c0 = 340.0;
  p.u0 = 68.0;
  p.Z = Complex(2.0, -2.0);
  p.beta_v = Complex(0.5, 0.5);
  return p;
}

inline MeshSpec small_spec(int refinement = 0)
{
  MeshSpec s;
  s.L = 1.0;
  s.R = 0.5;
  s.n_axial = 3;
  s.n_ring = 1;
  s.refinement_level = refinement;
  return s;
}

// Mesh, measure and operators kept together so the references stay valid.
struct Model
{
  CylinderMesh mesh;
  BoundaryMeasure measure;
  FormOperators ops;

  explicit Model(const MeshSpec &spec, double surface_weight = 1.0,
                 std::optional<CantorComponent> cantor = std::nullopt)
      : mesh(generate(spec)), measure(build_measure(mesh, surface_weight, cantor)),
        ops(mesh, measure)
  {
  }
  Model(const Model &) = delete;
  Model &operator=(const Model &) = delete;
};

inline Eigen::VectorXcd random_vector(std::size_t n, std::mt19937_64 &rng)
{
  std::normal_distribution<double> g;
  Eigen::VectorXcd v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i)
  {
    v[i] = Complex(g(rng), g(rng));
  }
  return v;
}

inline std::vector<double> random_chi(std::size_t n, std::mt19937_64 &rng)
{
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> chi(n);
  for (double &c : chi)
  {
    c = u(rng);
  }
  return chi;
}

// Uniformly distributed point of the open unit disc.
inline Complex random_in_disc(std::mt19937_64 &rng, double radius = 0.999)
{
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (;;)
  {
    const Complex z(u(rng), u(rng));
    if (std::abs(z) < radius)
    {
      return z;
    }
  }
}

}  // namespace liner::testing

#endif  // LINER_TESTS_SUPPORT_HPP
