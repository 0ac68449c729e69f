// SPDX-License-Identifier: Apache-2.0

#include "liner/cli.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "liner/admissibility.hpp"
#include "liner/config.hpp"
#include "liner/energy.hpp"
#include "liner/error.hpp"
#include "liner/io.hpp"
#include "liner/optimize.hpp"
#include "liner/parallel.hpp"
#include "liner/solver.hpp"
#include "liner/verify.hpp"

namespace liner::cli
{

namespace
{

namespace fs = std::filesystem;
using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr const char *kVersion = "0.1.0";

double seconds_since(Clock::time_point start)
{
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string hex(std::uint64_t h)
{
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(h));
  return buffer;
}

std::uint64_t fnv1a(const std::string &text)
{
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text)
  {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::ofstream open_output(const fs::path &path)
{
  if (path.has_parent_path())
  {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), "cannot open output file " + path.string());
  return out;
}

template <class Writer>
void write_file(const fs::path &path, Writer &&writer)
{
  std::ofstream out = open_output(path);
  writer(out);
  out.flush();
  require(static_cast<bool>(out), "failed writing " + path.string());
}

// Parsed and validated configuration with the hash of its text.
struct LoadedConfig
{
  RunConfig config;
  std::string path;
  std::uint64_t hash = 0;
};

LoadedConfig load(const std::string &path)
{
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), "cannot read config file " + path);
  std::stringstream text;
  text << in.rdbuf();
  LoadedConfig lc;
  lc.path = path;
  lc.hash = fnv1a(text.str());
  std::istringstream parse_in(text.str());
  lc.config = parse_config(parse_in);
  validate(lc.config);
  return lc;
}

// Everything built from a config: mesh, measure, operators and the state problem.
struct Pipeline
{
  CylinderMesh mesh;
  BoundaryMeasure measure;
  std::unique_ptr<FormOperators> ops;
  Problem problem;
  double k0 = 0.0;
  EnergySpec energy;

  explicit Pipeline(const RunConfig &c)
  {
    const MeshSpec spec = mesh_spec(c);
    mesh = c.mesh.cache_dir.empty() ? generate(spec) : generate_cached(spec, c.mesh.cache_dir);
    measure = build_measure(mesh, c.measure.surface_weight, cantor_component(c));
    ops = std::make_unique<FormOperators>(mesh, measure);

    const PhysicalParams p = physical_params(c);
    problem.ops = ops.get();
    problem.derived = derive(p);
    problem.beta_v = p.beta_v;
    const ImpedanceModel z = impedance_model(c);
    if (!z.is_constant())
    {
      problem.impedance = z;
    }
    problem.sources = SourceData::zero(mesh.num_nodes());
    problem.sources.g.setConstant(Complex(c.run.inflow_re, c.run.inflow_im));
    problem.sources.eta.setConstant(Complex(c.run.wall_source, 0.0));
    k0 = problem.derived.k0;
    energy = energy_spec(c);
  }
  Pipeline(const Pipeline &) = delete;
  Pipeline &operator=(const Pipeline &) = delete;

  LinerDensity density(const RunConfig &c) const
  {
    if (c.run.chi_file.empty())
    {
      return uniform_density(*ops, c.run.chi);
    }
    std::ifstream in(c.run.chi_file);
    require(static_cast<bool>(in), "cannot read chi file " + c.run.chi_file);
    std::vector<double> values = read_chi_csv(mesh, in);
    return {values, liner_mass(*ops, values)};
  }

  json describe() const
  {
    return {{"nodes", mesh.num_nodes()},
            {"tets", mesh.num_tets()},
            {"lateral_facets", ops->num_lateral()},
            {"mesh_hash", hex(mesh.spec().hash())},
            {"k0", k0},
            {"M0", problem.derived.M0}};
  }
};

json summary(const std::string &command, const LoadedConfig *config)
{
  json j;
  j["command"] = command;
  j["version"] = kVersion;
  j["threads"] = thread_limit();
  if (config != nullptr)
  {
    j["config"] = config->path;
    j["config_hash"] = hex(config->hash);
    j["seed"] = config->config.run.seed;
  }
  return j;
}

void write_summary(const fs::path &path, const json &j)
{
  write_file(path, [&](std::ostream &o) { o << j.dump(2) << '\n'; });
}

fs::path summary_path(const fs::path &artifact)
{
  fs::path p = artifact;
  return p.replace_extension(".json");
}

void apply_threads(std::optional<unsigned> flag, const RunConfig *config)
{
  if (flag)
  {
    set_thread_limit(*flag);
  }
  else if (config != nullptr)
  {
    set_thread_limit(config->run.threads);
  }
}

Ratio parse_ratio(const std::string &text)
{
  if (text == "inf" || text == "+inf")
  {
    return RatioLimit::PlusInfinity;
  }
  if (text == "-inf")
  {
    return RatioLimit::MinusInfinity;
  }
  try
  {
    std::size_t used = 0;
    const double r = std::stod(text, &used);
    if (used == text.size() && std::isfinite(r))
    {
      return r;
    }
  }
  catch (const std::exception &)
  {
  }
  throw ValidationError("--ratio must be a finite number, inf or -inf; got '" + text + "'");
}

// ---------------------------------------------------------------------------------------

struct Options
{
  std::optional<unsigned> threads;
  std::string config;
  std::string out;
  std::string out_dir = ".";
  std::string ratio = "1";
  int n = 256;
  double d = 2.0;
  int samples = 400;
  bool matrix = false;
  std::string level = "quick";
};

int cmd_mesh(const Options &opt, std::ostream &out)
{
  const auto start = Clock::now();
  const LoadedConfig lc = load(opt.config);
  apply_threads(opt.threads, &lc.config);
  const MeshSpec spec = mesh_spec(lc.config);
  const CylinderMesh mesh = lc.config.mesh.cache_dir.empty()
                                ? generate(spec)
                                : generate_cached(spec, lc.config.mesh.cache_dir);
  const fs::path path = opt.out.empty() ? "mesh.vtk" : opt.out;
  write_file(path, [&](std::ostream &o) { write_mesh_vtk(mesh, o); });

  json j = summary("mesh", &lc);
  j["outputs"] = {path.string()};
  j["results"] = {{"nodes", mesh.num_nodes()},
                  {"tets", mesh.num_tets()},
                  {"inflow_facets", mesh.boundary_of(FacetTag::In).size()},
                  {"outlet_facets", mesh.boundary_of(FacetTag::Out).size()},
                  {"lateral_facets", mesh.boundary_of(FacetTag::Lateral).size()},
                  {"max_edge", mesh.max_edge_length()},
                  {"mesh_hash", hex(spec.hash())}};
  j["timings"] = {{"total_seconds", seconds_since(start)}};
  write_summary(summary_path(path), j);
  out << "mesh: " << mesh.num_nodes() << " nodes, " << mesh.num_tets() << " tets -> "
      << path.string() << '\n';
  return kOk;
}

int cmd_zone(const Options &opt, std::ostream &out)
{
  const auto start = Clock::now();
  apply_threads(opt.threads, nullptr);
  const Ratio ratio = parse_ratio(opt.ratio);
  const ZoneRaster raster = rasterize_zone(ratio, opt.n);
  const fs::path path = opt.out.empty() ? "zone.csv" : opt.out;
  write_file(path, [&](std::ostream &o) { write_zone_csv(raster, o); });

  json j = summary("zone", nullptr);
  j["inputs"] = {{"ratio", opt.ratio}, {"n", opt.n}};
  j["outputs"] = {path.string()};
  j["results"] = {{"rows", static_cast<long long>(opt.n) * opt.n},
                  {"fraction_member", raster.fraction_member()}};
  j["timings"] = {{"total_seconds", seconds_since(start)}};
  write_summary(summary_path(path), j);
  out << "zone: r = " << opt.ratio << ", n = " << opt.n << ", admissible fraction "
      << format_double(raster.fraction_member()) << " -> " << path.string() << '\n';
  return kOk;
}

int cmd_measure_check(const Options &opt, std::ostream &out)
{
  const auto start = Clock::now();
  const LoadedConfig lc = load(opt.config);
  apply_threads(opt.threads, &lc.config);
  const CylinderMesh mesh = generate(mesh_spec(lc.config));
  const BoundaryMeasure mu =
      build_measure(mesh, lc.config.measure.surface_weight, cantor_component(lc.config));
  const RegularityEstimate est =
      estimate_upper_regularity(mu, opt.d, opt.samples, lc.config.run.seed);

  // The same samples at smaller exponents must not give a larger constant.
  json scan = json::array();
  bool monotone = true;
  double previous = 0.0;
  for (double d : {1.1, 1.25, 1.5, 1.75, 2.0})
  {
    const double A = estimate_upper_regularity(mu, d, opt.samples, lc.config.run.seed).A_hat;
    monotone = monotone && A >= previous;
    previous = A;
    scan.push_back({{"d", d}, {"A_hat", A}});
  }

  const fs::path path = opt.out.empty() ? "measure.json" : opt.out;
  json j = summary("measure-check", &lc);
  j["inputs"] = {{"d", opt.d}, {"samples", opt.samples}};
  j["outputs"] = {path.string()};
  j["results"] = {{"total_mass", mu.total_mass()},
                  {"lateral_mass", mu.mass_of(FacetTag::Lateral)},
                  {"inflow_mass", mu.mass_of(FacetTag::In)},
                  {"outlet_mass", mu.mass_of(FacetTag::Out)},
                  {"quadrature_points", mu.num_points()},
                  {"resolution", mu.resolution()},
                  {"charges_whole_boundary", mu.charges_whole_boundary()},
                  {"A_hat", est.A_hat},
                  {"worst_radius", est.worst_radius},
                  {"radii", est.radii},
                  {"monotone_in_d", monotone},
                  {"d_scan", scan}};
  j["timings"] = {{"total_seconds", seconds_since(start)}};
  write_summary(path, j);
  out << "measure-check: A_hat(d = " << format_double(opt.d) << ") = "
      << format_double(est.A_hat) << " over " << est.radii.size() << " radii, monotone in d: "
      << (monotone ? "yes" : "no") << " -> " << path.string() << '\n';
  return monotone ? kOk : kNumerical;
}

int cmd_solve(const Options &opt, std::ostream &out, std::ostream &err)
{
  const auto start = Clock::now();
  const LoadedConfig lc = load(opt.config);
  apply_threads(opt.threads, &lc.config);
  const Pipeline pipe(lc.config);
  const LinerDensity chi = pipe.density(lc.config);
  const auto assembled_at = Clock::now();
  const AssembledSystem sys = assemble(*pipe.ops, pipe.problem.at(pipe.k0), pipe.problem.beta_v,
                                       chi, pipe.problem.sources);
  const double assemble_seconds = seconds_since(assembled_at);
  const auto solve_at = Clock::now();
  const SolutionField u = solve(sys);
  const double solve_seconds = seconds_since(solve_at);
  for (const auto &w : u.warnings)
  {
    err << "warning: " << w << '\n';
  }
  const double J = energy(pipe.energy, *pipe.ops, u.values);

  const fs::path dir = opt.out_dir;
  std::vector<std::string> outputs{(dir / "solution.vtk").string(),
                                   (dir / "solution.csv").string()};
  write_file(dir / "solution.vtk", [&](std::ostream &o) { write_solution_vtk(pipe.mesh, u.values, o); });
  write_file(dir / "solution.csv", [&](std::ostream &o) { write_solution_csv(u.values, o); });
  if (opt.matrix)
  {
    write_file(dir / "matrix.mtx", [&](std::ostream &o) { write_matrix_market(sys.matrix, o); });
    outputs.push_back((dir / "matrix.mtx").string());
  }

  json j = summary("solve", &lc);
  j["inputs"] = pipe.describe();
  j["inputs"]["chi_hash"] = hex(u.chi_hash);
  j["inputs"]["chi_mass"] = chi.gamma;
  j["outputs"] = outputs;
  j["results"] = {{"energy", J},
                  {"residual", u.residual},
                  {"rcond", u.rcond},
                  {"v_norm", v_norm(sys, u.values)},
                  {"solver_backend", SparseFactorization::backend()},
                  {"warnings", u.warnings}};
  j["timings"] = {{"assemble_seconds", assemble_seconds},
                  {"solve_seconds", solve_seconds},
                  {"total_seconds", seconds_since(start)}};
  write_summary(dir / "solve.json", j);
  out << "solve: " << pipe.mesh.num_nodes() << " nodes, J = " << format_double(J)
      << ", residual " << format_double(u.residual) << " -> " << dir.string() << '\n';
  return kOk;
}

int cmd_sweep(const Options &opt, std::ostream &out)
{
  const auto start = Clock::now();
  const LoadedConfig lc = load(opt.config);
  apply_threads(opt.threads, &lc.config);
  const Pipeline pipe(lc.config);
  const LinerDensity chi = pipe.density(lc.config);
  const BandEnergy band = total_energy(pipe.energy, pipe.problem, chi);

  const fs::path path = opt.out.empty() ? "sweep.csv" : opt.out;
  write_file(path, [&](std::ostream &o) {
    o << "k0,J,weight\n";
    for (std::size_t i = 0; i < band.k0.size(); ++i)
    {
      o << format_double(band.k0[i]) << ',' << format_double(band.J[i]) << ','
        << format_double(band.weights[i]) << '\n';
    }
  });
  json j = summary("sweep", &lc);
  j["inputs"] = pipe.describe();
  j["inputs"]["band"] = {{"k_min", pipe.energy.k_min},
                         {"k_max", pipe.energy.k_max},
                         {"n_quad", pipe.energy.n_quad}};
  j["outputs"] = {path.string()};
  j["results"] = {{"total", band.total}, {"k0", band.k0}, {"J", band.J}};
  j["timings"] = {{"total_seconds", seconds_since(start)}};
  write_summary(summary_path(path), j);
  out << "sweep: " << band.k0.size() << " wavenumbers, band energy "
      << format_double(band.total) << " -> " << path.string() << '\n';
  return kOk;
}

int cmd_optimize(const Options &opt, std::ostream &out)
{
  const auto start = Clock::now();
  const LoadedConfig lc = load(opt.config);
  apply_threads(opt.threads, &lc.config);
  const Pipeline pipe(lc.config);
  const RunConfig &c = lc.config;
  const FeasibleSet set = FeasibleSet::of(*pipe.ops, c.optimize.gamma);

  OptimizeOptions options;
  options.mode = c.optimize.mode == "band" ? Mode::Band : Mode::Single;
  options.k0 = pipe.k0;
  options.energy = pipe.energy;
  options.max_iters = c.optimize.max_iters;
  options.tol = c.optimize.tol;
  const LinerDensity initial =
      c.run.chi_file.empty() ? uniform_density(*pipe.ops, c.optimize.gamma)
                             : pipe.density(c);
  const OptimizeReport report = minimize(pipe.problem, set, initial, options);

  const fs::path dir = opt.out_dir;
  write_file(dir / "chi.csv", [&](std::ostream &o) { write_chi_csv(pipe.mesh, report.chi, o); });
  write_file(dir / "chi_threshold.csv",
             [&](std::ostream &o) { write_chi_csv(pipe.mesh, report.chi_threshold, o); });

  json j = summary("optimize", &lc);
  j["inputs"] = pipe.describe();
  j["inputs"]["gamma"] = c.optimize.gamma;
  j["inputs"]["mode"] = c.optimize.mode;
  j["outputs"] = {(dir / "chi.csv").string(), (dir / "chi_threshold.csv").string()};
  j["results"] = json::parse(to_json(report));
  j["timings"] = {{"total_seconds", seconds_since(start)}};
  write_summary(dir / "optimize.json", j);

  for (const auto &it : report.iterates)
  {
    char line[160];
    std::snprintf(line, sizeof line, "%4d  J %.10e  step %.3e  pg %.3e\n", it.iteration, it.J,
                  it.step, it.pg_norm);
    out << line;
  }
  out << "optimize: " << report.stop_reason << ", J relaxed " << format_double(report.J_relaxed)
      << ", thresholded " << format_double(report.J_threshold) << " -> " << dir.string() << '\n';
  return kOk;
}

int cmd_verify(const Options &opt, std::ostream &out)
{
  apply_threads(opt.threads, nullptr);
  const verify::Level level = opt.level == "full" ? verify::Level::Full : verify::Level::Quick;
  int failed = 0;
  verify::run_all(level, [&](const verify::CheckResult &r) {
    char line[160];
    std::snprintf(line, sizeof line, "%-4s %d  %-42s %7.2f s\n", r.passed ? "PASS" : "FAIL",
                  r.id, r.name.c_str(), r.seconds);
    out << line << "        " << r.detail << '\n';
    out.flush();
    failed += r.passed ? 0 : 1;
  });
  out << (failed == 0 ? "all checks passed" : std::to_string(failed) + " check(s) failed")
      << '\n';
  return failed == 0 ? kOk : kNumerical;
}

}  // namespace

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err)
{
  CLI::App app{"Convected Helmholtz solver and liner optimizer for a cylindrical duct",
               "linersolve"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();

  Options opt;
  unsigned threads = 0;
  auto *threads_opt =
      app.add_option("--threads", threads, "Worker thread cap (LINERSOLVE_THREADS overrides)");

  auto config_option = [&](CLI::App *sub) {
    sub->add_option("-c,--config", opt.config, "Run configuration file")->required();
  };

  auto *mesh = app.add_subcommand("mesh", "Generate the duct mesh and write it as VTK");
  config_option(mesh);
  mesh->add_option("-o,--out", opt.out, "Output VTK file (default mesh.vtk)");

  auto *zone = app.add_subcommand("zone", "Rasterize the admissible zone of beta_v");
  zone->add_option("--ratio", opt.ratio, "Admittance ratio Im(Y)/Re(Y), or inf / -inf");
  zone->add_option("--n", opt.n, "Raster resolution per axis")->check(CLI::Range(16, 8192));
  zone->add_option("-o,--out", opt.out, "Output CSV file (default zone.csv)");

  auto *measure = app.add_subcommand("measure-check", "Report masses and upper regularity");
  config_option(measure);
  measure->add_option("--d", opt.d, "Regularity exponent in (1, 2]");
  measure->add_option("--samples", opt.samples, "Number of sampled centers");
  measure->add_option("-o,--out", opt.out, "Output JSON file (default measure.json)");

  auto *solve_cmd = app.add_subcommand("solve", "Solve at k0 = omega / c0");
  config_option(solve_cmd);
  solve_cmd->add_option("--out-dir", opt.out_dir, "Output directory");
  solve_cmd->add_flag("--matrix", opt.matrix, "Also write the system matrix (Matrix Market)");

  auto *sweep = app.add_subcommand("sweep", "Energy at every band wavenumber");
  config_option(sweep);
  sweep->add_option("-o,--out", opt.out, "Output CSV file (default sweep.csv)");

  auto *optimize = app.add_subcommand("optimize", "Optimize the liner density");
  config_option(optimize);
  optimize->add_option("--out-dir", opt.out_dir, "Output directory");

  auto *verify_cmd = app.add_subcommand("verify", "Run the built-in acceptance checks");
  verify_cmd->add_option("--level", opt.level, "quick or full")
      ->check(CLI::IsMember({"quick", "full"}));

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError &e)
  {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidation;
  }
  if (threads_opt->count() > 0)
  {
    opt.threads = threads;
  }

  try
  {
    if (mesh->parsed()) return cmd_mesh(opt, out);
    if (zone->parsed()) return cmd_zone(opt, out);
    if (measure->parsed()) return cmd_measure_check(opt, out);
    if (solve_cmd->parsed()) return cmd_solve(opt, out, err);
    if (sweep->parsed()) return cmd_sweep(opt, out);
    if (optimize->parsed()) return cmd_optimize(opt, out);
    if (verify_cmd->parsed()) return cmd_verify(opt, out);
  }
  catch (const ValidationError &e)
  {
    err << "error: " << e.what() << '\n';
    return kValidation;
  }
  catch (const NumericalError &e)
  {
    err << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  }
  catch (const std::exception &e)
  {
    err << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  }
  return kValidation;
}

int run(int argc, const char *const *argv) { return run(argc, argv, std::cout, std::cerr); }

}  // namespace liner::cli
