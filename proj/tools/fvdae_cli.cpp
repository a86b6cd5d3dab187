// Command-line driver: convergence studies, verification suite and field dumps.
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fvdae/report.hpp"
#include "fvdae/study.hpp"
#include "fvdae/verify.hpp"

namespace fs = std::filesystem;
using namespace fvdae;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::vector<std::string> cases;
  std::string interp = "h";
  std::string method = "proposed";
  std::string tableau;  // spatial/temporal: sdirk3; verify: all
  std::vector<Index> grids{16, 32, 64, 128, 256};
  std::vector<int> steps;  // spatial stage 2: one value (512); temporal: 8..256
  Index grid = 0;          // temporal: 16; dump: 64
  int stage = 1;
  int np = 2;
  int npiso = 2;
  double nu = 0.0;  // 0: case default
  std::string out = "fvdae_out";
  std::string cache;
  int jobs = 1;
  bool svg = false;
  std::string identity;
  int ref_steps = 2048;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + std::to_string(v[k]);
  return s;
}

std::vector<CaseId> selected_cases(const Options& o, bool required) {
  if (o.cases.empty()) {
    if (required) throw UsageError("--case is required");
    return {CaseId::I, CaseId::II, CaseId::III, CaseId::IV};
  }
  std::vector<CaseId> out;
  for (const std::string& c : o.cases) {
    try {
      out.push_back(parse_case_id(c));
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  return out;
}

template <class T>
void require_ascending(const std::vector<T>& v, const char* flag) {
  if (v.empty()) throw UsageError(std::string(flag) + " needs at least one value");
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (v[k] <= 0) throw UsageError(std::string(flag) + " values must be positive");
    if (k > 0 && v[k] <= v[k - 1]) throw UsageError(std::string(flag) + " must be strictly ascending");
  }
}

std::optional<double> nu_override(const Options& o) {
  if (o.nu == 0.0) return std::nullopt;
  if (!(o.nu > 0.0)) throw UsageError("--nu must be positive");
  return o.nu;
}

SolverSettings solver_settings(const Options& o) {
  if (o.np < 1 || o.npiso < 1) throw UsageError("--np and --npiso must be at least 1");
  SolverSettings s;
  s.picard = o.np;
  s.piso = o.npiso;
  return s;
}

void print_header(const std::string& command, const Options& o, const std::vector<CaseId>& cases) {
  std::cout << "fvdae " << command << '\n';
  std::cout << "  cases      ";
  for (CaseId c : cases) {
    const CaseSpec s = case_spec(c, nu_override(o));
    std::cout << to_string(c) << "(nu=" << num(s.nu) << ",t_end=" << num(s.t_end()) << ") ";
  }
  std::cout << '\n';
}

int finish_study(const std::vector<std::pair<CaseId, StudyResult>>& results, const Options& o,
                 const std::string& kind) {
  fs::create_directories(o.out);
  const fs::path csv = fs::path(o.out) / (kind + "_results.csv");
  {
    std::ofstream f(csv);
    f << kResultsHeader << '\n';
    for (const auto& [id, r] : results) {
      std::ostringstream rows;
      write_results_csv(rows, r);
      std::string body = rows.str();
      f << body.substr(body.find('\n') + 1);
    }
  }
  std::ofstream summary(fs::path(o.out) / (kind + "_summary.txt"));
  int status = 0;
  for (const auto& [id, r] : results) {
    std::ostringstream text;
    text << "case " << to_string(id) << '\n';
    write_summary(text, r);
    std::cout << text.str();
    summary << text.str();
    if (o.svg) {
      std::ofstream svg(fs::path(o.out) / (kind + "_case" + to_string(id) + ".svg"));
      write_svg(svg, r, kind + " case " + to_string(id) + " (" + o.interp + ")");
    }
    const double limit = 10.0 * SolverSettings{}.pressure_tol;
    for (const RunRecord& run : r.runs)
      if (run.method == "proposed" && run.max_constraint > limit) {
        std::cerr << "constraint violated: case " << to_string(id) << " run " << run.n_grid << "/" << run.steps
                  << " max |D ubar - r| = " << run.max_constraint << '\n';
        status = kExitFailure;
      }
  }
  std::cout << "wrote " << csv.string() << '\n';
  return status;
}

int cmd_spatial(const Options& o) {
  const std::vector<CaseId> cases = selected_cases(o, false);
  require_ascending(o.grids, "--grids");
  if (o.stage != 1 && o.stage != 2) throw UsageError("--stage must be 1 or 2");
  const std::vector<int> steps = o.steps.empty() ? std::vector<int>{512} : o.steps;
  if (steps.size() != 1 || steps[0] <= 0) throw UsageError("spatial --steps takes one positive value");
  SpatialStudyConfig cfg;
  cfg.interp = parse_gfisdm_variant(o.interp);
  if (o.stage == 1 && cfg.interp == GfisdmVariant::Choi)
    throw UsageError("stage 1 needs a step-independent interpolation (not choi)");
  cfg.stage = o.stage;
  cfg.grids = o.grids;
  cfg.method = parse_step_method(o.method);
  cfg.tableau = o.tableau.empty() ? "sdirk3" : o.tableau;
  parse_tableau(cfg.tableau);
  cfg.steps = steps[0];
  cfg.solver = solver_settings(o);
  cfg.jobs = std::max(1, o.jobs);
  cfg.nu = nu_override(o);

  print_header("spatial", o, cases);
  std::cout << "  stage      " << cfg.stage << "\n  interp     " << o.interp << "\n  grids      " << join(cfg.grids)
            << '\n';
  if (cfg.stage == 2)
    std::cout << "  method     " << o.method << "\n  tableau    " << cfg.tableau << "\n  steps      " << cfg.steps
              << "\n  np         " << o.np << "\n  npiso      " << o.npiso << '\n';
  std::cout << "  out        " << o.out << "\n  jobs       " << cfg.jobs << '\n';

  std::vector<std::pair<CaseId, StudyResult>> results;
  for (CaseId id : cases) {
    cfg.case_id = id;
    results.emplace_back(id, run_spatial_study(cfg));
  }
  return finish_study(results, o, cfg.stage == 1 ? "spatial1" : "spatial2");
}

int cmd_temporal(const Options& o) {
  const std::vector<CaseId> cases = selected_cases(o, false);
  TemporalStudyConfig cfg;
  cfg.interp = parse_gfisdm_variant(o.interp);
  cfg.method = parse_step_method(o.method);
  cfg.tableau = o.tableau.empty() ? "sdirk3" : o.tableau;
  parse_tableau(cfg.tableau);
  cfg.grid = o.grid == 0 ? 16 : o.grid;
  if (cfg.grid < 4) throw UsageError("--grid must be at least 4");
  if (!o.steps.empty()) cfg.steps = o.steps;
  require_ascending(cfg.steps, "--steps");
  if (o.ref_steps <= cfg.steps.back()) throw UsageError("--ref-steps must exceed the finest --steps value");
  cfg.solver = solver_settings(o);
  cfg.reference.steps = o.ref_steps;
  cfg.reference.cache_dir = o.cache.empty() ? (fs::path(o.out) / "reference_cache").string() : o.cache;
  cfg.jobs = std::max(1, o.jobs);
  cfg.nu = nu_override(o);

  print_header("temporal", o, cases);
  std::cout << "  interp     " << o.interp << "\n  method     " << o.method << "\n  tableau    " << cfg.tableau
            << "\n  grid       " << cfg.grid << "\n  steps      " << join(cfg.steps) << "\n  np         " << o.np
            << "\n  npiso      " << o.npiso << "\n  reference  " << cfg.reference.tableau << "/proposed/"
            << cfg.reference.steps << " steps, np " << cfg.reference.picard << ", interp "
            << to_string(reference_variant(cfg.interp)) << "\n  cache      " << cfg.reference.cache_dir
            << "\n  out        " << o.out << "\n  jobs       " << cfg.jobs << '\n';

  std::vector<std::pair<CaseId, StudyResult>> results;
  for (CaseId id : cases) {
    cfg.case_id = id;
    results.emplace_back(id, run_temporal_study(cfg));
  }
  return finish_study(results, o, "temporal");
}

int cmd_verify(const Options& o) {
  std::vector<std::string> tableaux, identities;
  const bool only_identity = !o.identity.empty() && o.tableau.empty();
  const bool only_tableau = o.identity.empty() && !o.tableau.empty();
  if (!only_identity) {
    if (o.tableau.empty())
      tableaux = {"euler", "sdirk2", "sdirk3"};
    else
      tableaux = {o.tableau};
  }
  if (!only_tableau) {
    if (o.identity.empty()) {
      identities = identity_names();
    } else {
      const auto names = identity_names();
      if (std::ranges::find(names, o.identity) == names.end()) throw UsageError("unknown identity '" + o.identity + "'");
      identities = {o.identity};
    }
  }
  std::cout << "fvdae verify\n";
  std::string first_failure;
  auto report = [&](const Check& c) {
    const char* tag = c.passed ? "PASS" : c.expected_fail ? "XFAIL" : "FAIL";
    std::cout << "  " << tag << "  " << c.name;
    if (!c.detail.empty()) std::cout << "  (" << c.detail << ")";
    std::cout << '\n';
    if (!c.counts_as_pass() && first_failure.empty()) first_failure = c.name;
  };
  for (const std::string& t : tableaux) {
    try {
      parse_tableau(t);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    for (const Check& c : tableau_checks(t)) report(c);
  }
  for (const std::string& name : identities) report(run_identity(name));
  if (!first_failure.empty()) {
    std::cout << "verify failed: " << first_failure << '\n';
    return kExitFailure;
  }
  std::cout << "verify passed\n";
  return 0;
}

int cmd_dump(const Options& o) {
  const std::vector<CaseId> cases = selected_cases(o, true);
  if (cases.size() != 1) throw UsageError("dump takes a single --case");
  const Index n = o.grid == 0 ? 64 : o.grid;
  if (n < 4) throw UsageError("--grid must be at least 4");
  const CaseSpec spec = case_spec(cases[0], nu_override(o));
  const CaseSetup setup = make_case(spec, n, GfisdmVariant::Z);
  const DiscreteOperators& ops = *setup.ops;
  const CellVectorField u = sample_cell_velocity(ops.mesh(), 0.0, spec.nu);
  const FaceVectorField ubar = sample_face_velocity(ops.mesh(), 0.0, spec.nu);
  const MomentumSplit split = momentum_split(ops, 0.0, u, ubar);
  const CellVectorField rhs = lincomb(1.0, split.K_part, 1.0, split.N_part);
  const CellScalarField A = lincomb(1.0, split.diag_K, 1.0, split.diag_N);

  print_header("dump", o, cases);
  std::cout << "  grid       " << n << "\n  out        " << o.out << '\n';
  fs::create_directories(o.out);
  const std::string stem = "dump_case" + to_string(spec.id) + "_n" + std::to_string(n);
  const fs::path rhs_path = fs::path(o.out) / (stem + "_KNu_b.csv");
  const fs::path a_path = fs::path(o.out) / (stem + "_A.csv");
  {
    std::ofstream f(rhs_path);
    write_csv(f, ops.mesh(), rhs);
  }
  {
    std::ofstream f(a_path);
    write_csv(f, ops.mesh(), A);
  }
  std::cout << "wrote " << rhs_path.string() << "\nwrote " << a_path.string() << '\n';
  return 0;
}

void add_options(CLI::App& app, Options& o) {
  app.add_option("--case", o.cases, "Taylor-Green cases I, II, III, IV (comma list; default all)")->delimiter(',');
  app.add_option("--interp", o.interp, "face interpolation")
      ->check(CLI::IsMember({"z", "yu", "choi", "pascau", "h"}))
      ->capture_default_str();
  app.add_option("--method", o.method, "DAE Runge-Kutta treatment")
      ->check(CLI::IsMember({"direct", "proposed", "ls1", "ls2"}))
      ->capture_default_str();
  app.add_option("--tableau", o.tableau, "Butcher tableau (default sdirk3; verify: all)")
      ->check(CLI::IsMember({"euler", "sdirk2", "sdirk3"}));
  app.add_option("--grids", o.grids, "spatial study grids, ascending")->delimiter(',')->capture_default_str();
  app.add_option("--grid", o.grid, "single grid for temporal (16) and dump (64)");
  app.add_option("--steps", o.steps, "spatial stage 2: step count (512); temporal: ascending list (8..256)")
      ->delimiter(',');
  app.add_option("--stage", o.stage, "spatial stage: 1 (t = 0 derivatives) or 2 (marched)")->capture_default_str();
  app.add_option("--np", o.np, "Picard iterations per stage")->capture_default_str();
  app.add_option("--npiso", o.npiso, "PISO corrections per Picard iteration")->capture_default_str();
  app.add_option("--nu", o.nu, "viscosity override (default 1 for central cases, 0.1 for FROMM)");
  app.add_option("--out", o.out, "output directory")->capture_default_str();
  app.add_option("--cache", o.cache, "reference cache directory (default <out>/reference_cache)");
  app.add_option("--ref-steps", o.ref_steps, "reference step count")->capture_default_str();
  app.add_option("--jobs", o.jobs, "concurrent study points")->capture_default_str();
  app.add_flag("--svg", o.svg, "also write log-log SVG plots");
  app.add_option("--identity", o.identity, "verify a single identity");
}

std::string usage(const CLI::App& app) {
  return app.get_formatter()->make_help(&app, "fvdae", CLI::AppFormatMode::Normal);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Collocated finite-volume incompressible flow solver: DAE Runge-Kutta convergence studies"};
  app.set_config("--config", "", "key=value configuration file; command-line flags take precedence");
  app.require_subcommand(1, 1);
  app.fallthrough();
  Options o;
  add_options(app, o);
  CLI::App* spatial = app.add_subcommand("spatial", "spatial convergence study");
  CLI::App* temporal = app.add_subcommand("temporal", "temporal convergence study against a fine reference");
  CLI::App* verify = app.add_subcommand("verify", "tableau order conditions and discretisation identities");
  CLI::App* dump = app.add_subcommand("dump", "write (K+N)u+b and diag(K+N) cell fields to CSV");
  for (CLI::App* sub : {spatial, temporal, verify, dump}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << usage(app);
    return kExitUsage;
  }

  try {
    if (spatial->parsed()) return cmd_spatial(o);
    if (temporal->parsed()) return cmd_temporal(o);
    if (verify->parsed()) return cmd_verify(o);
    if (dump->parsed()) return cmd_dump(o);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n\n" << usage(app);
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}
