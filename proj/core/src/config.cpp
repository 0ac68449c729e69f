// SPDX-License-Identifier: Apache-2.0

#include "liner/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "liner/error.hpp"

namespace liner
{

namespace
{

std::string trim(const std::string &s)
{
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos)
  {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string &key, const std::string &value)
{
  try
  {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used == value.size() && std::isfinite(v))
    {
      return v;
    }
  }
  catch (const std::exception &)
  {
  }
  throw ValidationError(key + ": expected a finite number, got '" + value + "'");
}

long long parse_int(const std::string &key, const std::string &value)
{
  try
  {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used == value.size())
    {
      return v;
    }
  }
  catch (const std::exception &)
  {
  }
  throw ValidationError(key + ": expected an integer, got '" + value + "'");
}

using Setter = std::function<void(RunConfig &, const std::string &key, const std::string &value)>;

template <class T>
Setter number(T RunConfig::*section_ptr, double T::*field)
{
  return [=](RunConfig &c, const std::string &k, const std::string &v) {
    (c.*section_ptr).*field = parse_double(k, v);
  };
}

template <class T>
Setter optional_number(T RunConfig::*section_ptr, std::optional<double> T::*field)
{
  return [=](RunConfig &c, const std::string &k, const std::string &v) {
    (c.*section_ptr).*field = parse_double(k, v);
  };
}

template <class T, class I>
Setter integer(T RunConfig::*section_ptr, I T::*field)
{
  return [=](RunConfig &c, const std::string &k, const std::string &v) {
    const long long n = parse_int(k, v);
    if constexpr (std::is_unsigned_v<I>)
    {
      require(n >= 0, k + " must be >= 0");
    }
    (c.*section_ptr).*field = static_cast<I>(n);
  };
}

template <class T>
Setter text(T RunConfig::*section_ptr, std::string T::*field)
{
  return [=](RunConfig &c, const std::string &, const std::string &v) {
    (c.*section_ptr).*field = v;
  };
}

const std::map<std::string, Setter> &setters()
{
  using C = RunConfig;
  static const std::map<std::string, Setter> table = {
      {"physics.omega", optional_number(&C::physics, &C::Physics::omega)},
      {"physics.u0", optional_number(&C::physics, &C::Physics::u0)},
      {"physics.c0", optional_number(&C::physics, &C::Physics::c0)},
      {"physics.Z0", number(&C::physics, &C::Physics::Z0)},
      {"physics.Z_re", number(&C::physics, &C::Physics::Z_re)},
      {"physics.Z_im", number(&C::physics, &C::Physics::Z_im)},
      {"physics.beta_v_re", number(&C::physics, &C::Physics::beta_v_re)},
      {"physics.beta_v_im", number(&C::physics, &C::Physics::beta_v_im)},
      {"physics.Z_table", text(&C::physics, &C::Physics::Z_table)},
      {"mesh.L", number(&C::mesh, &C::Mesh::L)},
      {"mesh.R", number(&C::mesh, &C::Mesh::R)},
      {"mesh.n_axial", integer(&C::mesh, &C::Mesh::n_axial)},
      {"mesh.n_ring", integer(&C::mesh, &C::Mesh::n_ring)},
      {"mesh.refinement", integer(&C::mesh, &C::Mesh::refinement)},
      {"mesh.cache_dir", text(&C::mesh, &C::Mesh::cache_dir)},
      {"measure.surface_weight", number(&C::measure, &C::Measure::surface_weight)},
      {"measure.cantor_mass", number(&C::measure, &C::Measure::cantor_mass)},
      {"measure.cantor_level", integer(&C::measure, &C::Measure::cantor_level)},
      {"measure.cantor_begin", optional_number(&C::measure, &C::Measure::cantor_begin)},
      {"measure.cantor_end", optional_number(&C::measure, &C::Measure::cantor_end)},
      {"energy.a", number(&C::energy, &C::Energy::a)},
      {"energy.b", number(&C::energy, &C::Energy::b)},
      {"energy.d", number(&C::energy, &C::Energy::d)},
      {"energy.k_min", optional_number(&C::energy, &C::Energy::k_min)},
      {"energy.k_max", optional_number(&C::energy, &C::Energy::k_max)},
      {"energy.n_quad", integer(&C::energy, &C::Energy::n_quad)},
      {"optimize.gamma", number(&C::optimize, &C::Optimize::gamma)},
      {"optimize.mode", text(&C::optimize, &C::Optimize::mode)},
      {"optimize.max_iters", integer(&C::optimize, &C::Optimize::max_iters)},
      {"optimize.tol", number(&C::optimize, &C::Optimize::tol)},
      {"run.threads", integer(&C::run, &C::Run::threads)},
      {"run.seed", integer(&C::run, &C::Run::seed)},
      {"run.inflow_re", number(&C::run, &C::Run::inflow_re)},
      {"run.inflow_im", number(&C::run, &C::Run::inflow_im)},
      {"run.wall_source", number(&C::run, &C::Run::wall_source)},
      {"run.chi", number(&C::run, &C::Run::chi)},
      {"run.chi_file", text(&C::run, &C::Run::chi_file)},
  };
  return table;
}

}  // namespace

RunConfig parse_config(std::istream &in)
{
  static const char *sections[] = {"physics", "mesh", "measure", "energy", "optimize", "run"};
  RunConfig config;
  std::string section;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line))
  {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';')
    {
      continue;
    }
    const std::string where = "config line " + std::to_string(line_no) + ": ";
    if (line.front() == '[')
    {
      require(line.back() == ']', where + "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      bool known = false;
      for (const char *s : sections)
      {
        known = known || section == s;
      }
      require(known, where + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    require(eq != std::string::npos, where + "expected key = value");
    require(!section.empty(), where + "key outside of any section");
    const std::string key = section + "." + trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    require(it != setters().end(), where + "unknown key " + key);
    try
    {
      it->second(config, key, value);
    }
    catch (const ValidationError &e)
    {
      throw ValidationError(where + e.what());
    }
  }
  return config;
}

RunConfig load_config(const std::filesystem::path &path)
{
  std::ifstream in(path);
  require(static_cast<bool>(in), "cannot open config file " + path.string());
  return parse_config(in);
}

PhysicalParams physical_params(const RunConfig &c)
{
  require(c.physics.omega.has_value(), "physics.omega is required");
  require(c.physics.u0.has_value(), "physics.u0 is required");
  require(c.physics.c0.has_value(), "physics.c0 is required");
  PhysicalParams p;
  p.omega = *c.physics.omega;
  p.u0 = *c.physics.u0;
  p.c0 = *c.physics.c0;
  p.Z0 = c.physics.Z0;
  p.Z = Complex(c.physics.Z_re, c.physics.Z_im);
  p.beta_v = Complex(c.physics.beta_v_re, c.physics.beta_v_im);
  return p;
}

ImpedanceModel impedance_model(const RunConfig &c)
{
  if (trim(c.physics.Z_table).empty())
  {
    return ImpedanceModel(Complex(c.physics.Z_re, c.physics.Z_im));
  }
  std::vector<ImpedanceModel::Sample> table;
  std::istringstream rows(c.physics.Z_table);
  std::string row;
  while (std::getline(rows, row, ';'))
  {
    if (trim(row).empty())
    {
      continue;
    }
    std::istringstream fields(row);
    double k0 = 0, re = 0, im = 0;
    std::string rest;
    require(static_cast<bool>(fields >> k0 >> re >> im) && !(fields >> rest),
            "physics.Z_table: expected 'k0 re im' triples separated by ';'");
    table.push_back({k0, Complex(re, im)});
  }
  return ImpedanceModel(std::move(table));
}

MeshSpec mesh_spec(const RunConfig &c)
{
  MeshSpec s;
  s.L = c.mesh.L;
  s.R = c.mesh.R;
  s.n_axial = c.mesh.n_axial;
  s.n_ring = c.mesh.n_ring;
  s.refinement_level = c.mesh.refinement;
  return s;
}

std::optional<CantorComponent> cantor_component(const RunConfig &c)
{
  if (c.measure.cantor_mass == 0.0)
  {
    return std::nullopt;
  }
  CantorComponent cc;
  cc.level = c.measure.cantor_level;
  cc.mass = c.measure.cantor_mass;
  cc.x_begin = c.measure.cantor_begin;
  cc.x_end = c.measure.cantor_end;
  return cc;
}

EnergySpec energy_spec(const RunConfig &c)
{
  const PhysicalParams p = physical_params(c);
  const double k0 = p.omega / p.c0;
  EnergySpec e;
  e.a = c.energy.a;
  e.b = c.energy.b;
  e.d = c.energy.d;
  e.k_min = c.energy.k_min.value_or(k0);
  e.k_max = c.energy.k_max.value_or(k0);
  e.n_quad = c.energy.n_quad;
  return e;
}

void validate(const RunConfig &c)
{
  validate(physical_params(c));
  impedance_model(c);
  validate(mesh_spec(c));
  require(c.measure.surface_weight >= 0.0, "measure.surface_weight must be >= 0");
  require(c.measure.cantor_mass >= 0.0, "measure.cantor_mass must be >= 0");
  require(c.measure.surface_weight > 0.0 || c.measure.cantor_mass > 0.0,
          "the boundary measure needs surface_weight > 0 or cantor_mass > 0");
  if (auto cc = cantor_component(c))
  {
    require(cc->level >= 0 && cc->level <= 12, "measure.cantor_level must be in [0, 12]");
    const double a = cc->x_begin.value_or(0.0), b = cc->x_end.value_or(c.mesh.L);
    require(a >= 0.0 && b <= c.mesh.L && a < b,
            "measure.cantor_begin/cantor_end must satisfy 0 <= begin < end <= L");
  }
  validate(energy_spec(c));
  require(c.optimize.gamma > 0.0 && c.optimize.gamma < 1.0,
          "optimize.gamma must lie strictly between 0 and 1");
  require(c.optimize.mode == "single" || c.optimize.mode == "band",
          "optimize.mode must be single or band");
  require(c.optimize.max_iters >= 0, "optimize.max_iters must be >= 0");
  require(c.optimize.tol >= 0.0, "optimize.tol must be >= 0");
  require(c.run.chi >= 0.0 && c.run.chi <= 1.0, "run.chi must lie in [0, 1]");
}

std::string default_config_text()
{
  return R"([physics]
# required: angular frequency, mean flow speed, sound speed
omega = 340
u0 = 68
c0 = 340
Z0 = 1
Z_re = 1
Z_im = -1
beta_v_re = 0
beta_v_im = 0
# optional impedance table over k0: "k0 re im; k0 re im"
Z_table =

[mesh]
L = 2
R = 0.5
n_axial = 9
n_ring = 3
refinement = 0
cache_dir =

[measure]
surface_weight = 1
cantor_mass = 0
cantor_level = 6

[energy]
a = 1
b = 0
d = 0
# k_min and k_max default to omega / c0
n_quad = 5

[optimize]
gamma = 0.3
mode = single
max_iters = 30
tol = 1e-6

[run]
threads = 0
seed = 0
inflow_re = 1
inflow_im = 0
wall_source = 0
chi = 1
chi_file =
)";
}

}  // namespace liner
