#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hodgelab/curvature.hpp"
#include "hodgelab/error.hpp"
#include "hodgelab/exterior.hpp"
#include "hodgelab/fields.hpp"
#include "hodgelab/mesh.hpp"
#include "hodgelab/report.hpp"
#include "hodgelab/spectral.hpp"
#include "hodgelab/verify.hpp"

using namespace hodgelab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitFailure = 2;

struct SurfaceFlags {
  std::string kind = "icosphere";
  int level = -1;
  double radius = 1.0;
  double a = 1.0;
  double c = 2.0;
  CLI::Option* kind_opt = nullptr;
  CLI::Option* level_opt = nullptr;
  CLI::Option* radius_opt = nullptr;
  CLI::Option* a_opt = nullptr;
  CLI::Option* c_opt = nullptr;

  void add(CLI::App* cmd, bool level_required) {
    kind_opt = cmd->add_option("--kind", kind, "Surface: icosphere or spheroid")
                   ->check(CLI::IsMember({"icosphere", "spheroid"}));
    level_opt = cmd->add_option("--level", level, "Subdivision level (0..8)");
    if (level_required) level_opt->required();
    radius_opt = cmd->add_option("--radius", radius, "Icosphere radius");
    a_opt = cmd->add_option("--a", a, "Spheroid equatorial semi-axis");
    c_opt = cmd->add_option("--c", c, "Spheroid polar semi-axis");
    radius_opt->excludes(a_opt)->excludes(c_opt);
  }

  bool any_given() const {
    return kind_opt->count() || level_opt->count() || radius_opt->count() || a_opt->count() ||
           c_opt->count();
  }

  SurfaceSpec spec() const {
    if (kind == "spheroid") {
      require(!radius_opt->count(), "--radius applies to icospheres; use --a/--c", ErrorKind::Config);
      return SurfaceSpec::spheroid(level, a, c);
    }
    require(!a_opt->count() && !c_opt->count(), "--a/--c apply to spheroids; use --radius",
            ErrorKind::Config);
    return SurfaceSpec::icosphere(level, radius);
  }

  // Overrides the fields of `base` that were given on the command line.
  SurfaceSpec merge(const SurfaceSpec& base) const {
    SurfaceFlags f = *this;
    if (!kind_opt->count()) f.kind = base.kind == SurfaceKind::Icosphere ? "icosphere" : "spheroid";
    if (!level_opt->count()) f.level = base.level;
    if (f.kind == "icosphere") {
      if (!radius_opt->count()) f.radius = base.kind == SurfaceKind::Icosphere ? base.a : 1.0;
    } else if (base.kind == SurfaceKind::Spheroid) {
      if (!a_opt->count()) f.a = base.a;
      if (!c_opt->count()) f.c = base.c;
    }
    return f.spec();
  }
};

int exit_code(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::Solver:
    case ErrorKind::MeshQuality: return kExitFailure;
    default: return kExitUsage;
  }
}

std::uint64_t parse_seed(const std::string& text) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorKind::Config, "invalid seed '" + text + "'");
}

std::uint64_t env_seed(std::uint64_t fallback) {
  const char* env = std::getenv("HODGELAB_SEED");
  return env && *env ? parse_seed(env) : fallback;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw Error(ErrorKind::Io, "failed writing '" + path + "'");
}

std::string format(const char* pattern, double a, double b, double c, double d) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c, d);
  return buf;
}

// mesh ------------------------------------------------------------------

struct MeshArgs {
  SurfaceFlags surface;
  std::string out;
  std::string curvature_csv;
};

int cmd_mesh(const MeshArgs& args) {
  const TriangleMesh mesh = build_surface(args.surface.spec());
  std::printf("V=%zu E=%zu F=%zu\n", mesh.vertex_count(), mesh.edge_count(), mesh.face_count());
  const ValidationOutcome v = validate(mesh);
  for (const auto& c : v.checks)
    std::printf("  %-24s %s%s%s\n", c.name.c_str(), c.passed ? "ok" : "FAILED",
                c.message.empty() ? "" : ": ", c.message.c_str());
  std::printf("  euler characteristic %d, genus %d\n", v.euler_characteristic, v.genus);
  if (!args.out.empty()) {
    std::ofstream out(args.out);
    if (!out) throw Error(ErrorKind::Io, "cannot open '" + args.out + "' for writing");
    export_off(mesh, out);
  }
  if (!args.curvature_csv.empty()) {
    std::ofstream out(args.curvature_csv);
    if (!out) throw Error(ErrorKind::Io, "cannot open '" + args.curvature_csv + "' for writing");
    write_curvature_csv(angle_defect_curvature(mesh), out);
  }
  if (!v.passed()) {
    std::fprintf(stderr, "mesh validation failed: %s\n", v.first_failure().c_str());
    return kExitFailure;
  }
  return kExitOk;
}

// spectrum --------------------------------------------------------------

struct SpectrumArgs {
  SurfaceFlags surface;
  int form = 0;
  int count = 10;
  double tol = 1e-8;
  double rel_gap = kDefaultGroupRelGap;
  std::string seed;
  std::string out;
  std::string matrix_market;
};

int cmd_spectrum(const SpectrumArgs& args) {
  const TriangleMesh mesh = build_surface(args.surface.spec());
  const OperatorPair op = args.form == 0 ? laplacian0(mesh) : laplacian1(mesh);
  SolverOptions opt;
  opt.count = args.count;
  opt.tol = args.tol;
  opt.rel_gap = args.rel_gap;
  opt.seed = args.seed.empty() ? env_seed(opt.seed) : parse_seed(args.seed);
  if (args.form == 0) opt.deflation = Eigen::MatrixXd::Ones(op.A.rows(), 1);
  if (!args.matrix_market.empty()) {
    for (const auto& [suffix, m] : {std::pair{"_A.mtx", &op.A}, std::pair{"_B.mtx", &op.B}}) {
      std::ofstream out(args.matrix_market + suffix);
      if (!out) throw Error(ErrorKind::Io, "cannot write Matrix Market file");
      write_matrix_market(*m, out);
    }
  }
  SpectrumResult result;
  try {
    result = solve_lowest(op.A, op.B, opt);
  } catch (const SolverError& e) {
    std::fprintf(stderr, "solver failure: %s\nbest residuals:", e.what());
    for (double r : e.best_residuals()) std::fprintf(stderr, " %.3e", r);
    std::fprintf(stderr, "\n");
    return kExitFailure;
  }
  std::ostringstream csv;
  write_spectrum_csv(result, csv);
  if (args.out.empty())
    std::cout << csv.str();
  else
    write_file(args.out, csv.str());
  std::fprintf(stderr, "%d eigenpairs in %d iterations; groups:", args.count, result.iterations);
  for (const auto& g : result.groups) std::fprintf(stderr, " %.6g x%d", g.value, g.multiplicity);
  std::fprintf(stderr, "\n");
  return kExitOk;
}

// verify ----------------------------------------------------------------

struct VerifyArgs {
  SurfaceFlags surface;
  std::string config;
  std::string out;
  std::string table;
  std::string seed;
  int scalar_count = -1;
  int oneform_count = -1;
};

int cmd_verify(const VerifyArgs& args) {
  RunConfig config = args.config.empty() ? RunConfig{} : load_config(args.config);
  if (args.surface.any_given()) {
    const bool kind_changed = args.surface.kind_opt->count() &&
                              (args.surface.kind == "spheroid") !=
                                  (config.surface.kind == SurfaceKind::Spheroid);
    config.surface = args.surface.merge(config.surface);
    if (kind_changed) config.fields.clear();
  }
  config.seed = args.seed.empty() ? env_seed(config.seed) : parse_seed(args.seed);
  if (args.scalar_count > 0) config.scalar_eigenpairs = args.scalar_count;
  if (args.oneform_count > 0) config.oneform_eigenpairs = args.oneform_count;
  if (!args.out.empty()) config.report_path = args.out;
  if (!args.table.empty()) config.table_path = args.table;
  config.validate();

  const VerificationReport report = run_suite(config);
  const nlohmann::json j = to_json(report);
  const std::string table = render_table(j);
  std::cout << table;
  if (!config.report_path.empty()) write_file(config.report_path, dump_report(j));
  if (!config.table_path.empty()) write_file(config.table_path, table);
  return report.pass() ? kExitOk : kExitFailure;
}

// converge --------------------------------------------------------------

struct ConvergeArgs {
  double radius = 1.0;
  std::vector<int> levels;
  std::string target = "mu1";
  double tol = 1e-8;
  std::string seed;
  std::string out;
  double monotone_tol = 1e-12;
};

int cmd_converge(const ConvergeArgs& args) {
  std::vector<int> levels = args.levels;
  require(levels.size() >= 2, "convergence needs at least two levels", ErrorKind::Config);
  std::vector<int> sorted = levels;
  std::sort(sorted.begin(), sorted.end());
  require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
          "duplicate levels", ErrorKind::Config);
  if (sorted != levels) {
    std::string note = "note: levels reordered to";
    for (int l : sorted) note += " " + std::to_string(l);
    std::fprintf(stderr, "%s\n", note.c_str());
    levels = sorted;
  }
  for (int l : levels) SurfaceSpec::icosphere(l, args.radius);  // guard before any work
  const double alpha = 1.0 / (args.radius * args.radius);
  const double target = args.target == "mu2" ? 6.0 * alpha : 2.0 * alpha;
  const std::uint64_t seed = args.seed.empty() ? env_seed(20240611) : parse_seed(args.seed);

  std::ostringstream csv;
  csv << "level,target,lambda,error\n";
  std::vector<double> errors;
  for (int level : levels) {
    const SurfaceSpec surface = SurfaceSpec::icosphere(level, args.radius);
    const TriangleMesh mesh = build_surface(surface);
    double lambda = 0.0;
    if (args.target == "killing") {
      const OperatorPair op = laplacian1(mesh);
      const Cochain w = sample_oneform(AnalyticField::killing_rotation(Vec3::UnitZ(), surface), mesh);
      lambda = rayleigh_quotient(op.A, op.B, w.values);
    } else {
      const OperatorPair op = laplacian0(mesh);
      SolverOptions opt;
      opt.count = std::min<int>(9, static_cast<int>(op.A.rows()));
      opt.tol = args.tol;
      opt.seed = seed;
      opt.deflation = Eigen::MatrixXd::Ones(op.A.rows(), 1);
      const SpectrumResult s = solve_lowest(op.A, op.B, opt);
      const int g = s.group_near(target);
      lambda = s.groups[static_cast<std::size_t>(g)].value;
    }
    const double error = std::abs(lambda - target);
    errors.push_back(error);
    csv << format("%.0f,%.17g,%.17g,%.17g\n", level, target, lambda, error);
  }
  if (args.out.empty())
    std::cout << csv.str();
  else
    write_file(args.out, csv.str());
  for (std::size_t i = 1; i < errors.size(); ++i)
    if (errors[i] > errors[i - 1] + args.monotone_tol) {
      std::fprintf(stderr, "error is not decreasing between levels %d and %d (%.3e -> %.3e)\n",
                   levels[i - 1], levels[i], errors[i - 1], errors[i]);
      return kExitFailure;
    }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hodgelab: Hodge Laplacian spectra, Killing-type fields and eigenvalue bounds on "
               "triangulated spheres"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every command");

  MeshArgs mesh_args;
  auto* mesh_cmd = app.add_subcommand("mesh", "Build and validate a surface mesh; write OFF");
  mesh_args.surface.add(mesh_cmd, true);
  mesh_cmd->add_option("--out", mesh_args.out, "OFF output path");
  mesh_cmd->add_option("--curvature-csv", mesh_args.curvature_csv, "Per-vertex curvature CSV");

  SpectrumArgs spec_args;
  auto* spec_cmd = app.add_subcommand("spectrum", "Lowest eigenpairs of the 0- or 1-form Laplacian");
  spec_args.surface.add(spec_cmd, true);
  spec_cmd->add_option("--form", spec_args.form, "Form degree: 0 or 1")
      ->required()
      ->check(CLI::IsMember({0, 1}));
  spec_cmd->add_option("--count", spec_args.count, "Number of eigenpairs")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  spec_cmd->add_option("--tol", spec_args.tol, "Relative residual tolerance")->capture_default_str();
  spec_cmd->add_option("--rel-gap", spec_args.rel_gap, "Relative gap for grouping")
      ->capture_default_str();
  spec_cmd->add_option("--seed", spec_args.seed, "Starting block seed (overrides HODGELAB_SEED)");
  spec_cmd->add_option("--out", spec_args.out, "CSV output path (default: stdout)");
  spec_cmd->add_option("--matrix-market", spec_args.matrix_market,
                       "Also write PREFIX_A.mtx and PREFIX_B.mtx");

  VerifyArgs verify_args;
  auto* verify_cmd = app.add_subcommand("verify", "Run the verification suite");
  verify_args.surface.add(verify_cmd, false);
  verify_cmd->add_option("--config", verify_args.config, "JSON run configuration");
  verify_cmd->add_option("--out", verify_args.out, "JSON report path");
  verify_cmd->add_option("--table", verify_args.table, "Also write the table to this path");
  verify_cmd->add_option("--seed", verify_args.seed, "Seed (overrides config and HODGELAB_SEED)");
  verify_cmd->add_option("--scalar-count", verify_args.scalar_count, "Scalar eigenpairs")
      ->check(CLI::PositiveNumber);
  verify_cmd->add_option("--oneform-count", verify_args.oneform_count, "1-form eigenpairs")
      ->check(CLI::PositiveNumber);

  ConvergeArgs conv_args;
  auto* conv_cmd = app.add_subcommand("converge", "Eigenvalue error across refinement levels");
  conv_cmd->add_option("--levels", conv_args.levels, "Comma-separated levels, e.g. 3,4,5,6")
      ->required()
      ->delimiter(',');
  conv_cmd->add_option("--radius", conv_args.radius, "Icosphere radius")->capture_default_str();
  conv_cmd->add_option("--target", conv_args.target,
                       "mu1 (n alpha), mu2 (2(n+1) alpha) or killing (Rayleigh quotient, 2 alpha)")
      ->check(CLI::IsMember({"mu1", "mu2", "killing"}))
      ->capture_default_str();
  conv_cmd->add_option("--tol", conv_args.tol, "Solver tolerance")->capture_default_str();
  conv_cmd->add_option("--seed", conv_args.seed, "Seed (overrides HODGELAB_SEED)");
  conv_cmd->add_option("--out", conv_args.out, "CSV output path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (mesh_cmd->parsed()) return cmd_mesh(mesh_args);
    if (spec_cmd->parsed()) return cmd_spectrum(spec_args);
    if (verify_cmd->parsed()) return cmd_verify(verify_args);
    if (conv_cmd->parsed()) return cmd_converge(conv_args);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitFailure;
  }
  return kExitUsage;
}
