// SPDX-License-Identifier: Apache-2.0

#ifndef LINER_CONFIG_HPP
#define LINER_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "liner/energy.hpp"
#include "liner/measure.hpp"
#include "liner/mesh.hpp"
#include "liner/params.hpp"

namespace liner
{

//
// Run configuration read from a key = value file with [physics], [mesh], [measure],
// [energy], [optimize] and [run] sections. Lines starting with '#' or ';' are comments.
// Every key except physics.omega, physics.u0 and physics.c0 has a default.
//
struct RunConfig
{
  struct Physics
  {
    std::optional<double> omega, u0, c0;
    double Z0 = 1.0;
    double Z_re = 1.0;
    double Z_im = -1.0;
    double beta_v_re = 0.0;
    double beta_v_im = 0.0;
    // "k0 re im; k0 re im; ..." piecewise-linear impedance over k0, empty for constant Z.
    std::string Z_table;
  } physics;

  struct Mesh
  {
    double L = 2.0;
    double R = 0.5;
    int n_axial = 9;
    int n_ring = 3;
    int refinement = 0;
    std::string cache_dir;  // empty disables the binary cache
  } mesh;

  struct Measure
  {
    double surface_weight = 1.0;
    double cantor_mass = 0.0;  // 0 disables the Cantor component
    int cantor_level = 6;
    std::optional<double> cantor_begin, cantor_end;
  } measure;

  struct Energy
  {
    double a = 1.0;
    double b = 0.0;
    double d = 0.0;
    std::optional<double> k_min, k_max;  // default to the configured k0
    int n_quad = 5;
  } energy;

  struct Optimize
  {
    double gamma = 0.3;
    std::string mode = "single";
    int max_iters = 30;
    double tol = 1e-6;
  } optimize;

  struct Run
  {
    unsigned threads = 0;
    std::uint64_t seed = 0;
    double inflow_re = 1.0;  // Dirichlet data on x = 0
    double inflow_im = 0.0;
    double wall_source = 0.0;  // constant eta on the lateral wall
    double chi = 1.0;          // uniform liner density used by solve and sweep
    std::string chi_file;      // overrides chi when set
  } run;
};

RunConfig parse_config(std::istream &in);
RunConfig load_config(const std::filesystem::path &path);

// Checks every module precondition that can be checked without building the mesh.
void validate(const RunConfig &config);

PhysicalParams physical_params(const RunConfig &config);
ImpedanceModel impedance_model(const RunConfig &config);
MeshSpec mesh_spec(const RunConfig &config);
std::optional<CantorComponent> cantor_component(const RunConfig &config);
EnergySpec energy_spec(const RunConfig &config);

// Text of a configuration file listing every key with its default.
std::string default_config_text();

}  // namespace liner

#endif  // LINER_CONFIG_HPP
