#include "fvdae/study.hpp"

#include <atomic>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace fvdae {

PicardConfig SolverSettings::picard_config() const {
  PicardConfig c;
  c.picard_iterations = picard;
  c.piso_loops = piso;
  c.picard_tol = picard_tol;
  c.pressure.rel_tol = pressure_tol;
  c.momentum.rel_tol = momentum_tol;
  return c;
}

const FieldOrder& StudyResult::order(const std::string& field) const {
  for (const FieldOrder& o : orders)
    if (o.field == field) return o;
  throw std::out_of_range("no observed order for field '" + field + "'");
}

namespace {

// ‖Dū - r‖∞ and the same relative to the largest row of |D||ū|
std::pair<double, double> constraint_defect(const DiscreteOperators& ops, const DaeState& s) {
  const SparseOperator& D = ops.D();
  const CellScalarField r = ops.continuity_value(s.t);
  const auto off = D.row_offsets();
  double worst = 0.0, scale = 0.0;
  for (Index c = 0; c < D.rows(); ++c) {
    double sum = 0.0, mag = 0.0;
    for (Index q = off[static_cast<std::size_t>(c)]; q < off[static_cast<std::size_t>(c + 1)]; ++q) {
      const double term = D.values()[static_cast<std::size_t>(q)] * s.ubar[D.columns()[static_cast<std::size_t>(q)]];
      sum += term;
      mag += std::abs(term);
    }
    worst = std::max(worst, std::abs(sum - r[c]));
    scale = std::max(scale, mag);
  }
  return {worst, scale > 0.0 ? worst / scale : worst};
}

std::optional<double> init_scale(const GfisdmScheme& scheme, const ButcherTableau& tab, double h) {
  if (!scheme.uses_step_scale()) return std::nullopt;
  return h * tab.a(0, 0);
}

std::vector<double> l2_of(const std::vector<RunRecord>& runs, NormPair RunRecord::*field) {
  std::vector<double> out;
  for (const RunRecord& r : runs) out.push_back((r.*field).l2);
  return out;
}

void fill_orders(StudyResult& res, const std::vector<double>& spacing) {
  if (res.runs.size() < 2) return;
  const std::array<NormPair RunRecord::*, 3> members{&RunRecord::u, &RunRecord::ubar, &RunRecord::p};
  for (std::size_t k = 0; k < 3; ++k) {
    const OrderFit fit = observed_order(l2_of(res.runs, members[k]), spacing);
    res.orders.push_back({res.fields[k], fit.slope, fit.valid});
  }
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

void run_parallel(int count, int jobs, const std::function<void(int)>& task) {
  const int workers = std::max(1, std::min(jobs, count));
  if (workers == 1) {
    for (int k = 0; k < count; ++k) task(k);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int k = next++; k < count; k = next++) {
        try {
          task(k);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (std::thread& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

DaeState march(const Stepper& stepper, DaeState start, double t_end, int steps, MarchStats* stats) {
  if (steps < 1) throw std::invalid_argument("march needs at least one step");
  const double t0 = start.t;
  const double h = (t_end - t0) / steps;
  DaeState s = std::move(start);
  StepDiagnostics diag;
  MarchStats local;
  for (int n = 0; n < steps; ++n) {
    s = stepper.step(s, h, &diag);
    s.t = t0 + (n + 1) * h;
    local.max_theta = std::max(local.max_theta, diag.theta_last);
    if (stats) {
      const auto [abs_defect, rel_defect] = constraint_defect(stepper.operators(), s);
      local.max_constraint = std::max(local.max_constraint, abs_defect);
      local.max_constraint_rel = std::max(local.max_constraint_rel, rel_defect);
    }
  }
  if (stats) *stats = local;
  return s;
}

StudyResult run_spatial_study(const SpatialStudyConfig& config) {
  if (config.grids.size() < 1) throw std::invalid_argument("spatial study needs at least one grid");
  if (config.stage != 1 && config.stage != 2) throw std::invalid_argument("spatial stage must be 1 or 2");
  const CaseSpec spec = case_spec(config.case_id, config.nu);
  StudyResult res;
  res.kind = config.stage == 1 ? "spatial1" : "spatial2";
  res.fields = config.stage == 1 ? std::vector<std::string>{"u_rate", "ubar_rate", "p"}
                                 : std::vector<std::string>{"u", "ubar", "p"};
  res.runs.resize(config.grids.size());
  run_parallel(static_cast<int>(config.grids.size()), config.jobs, [&](int k) {
    const Index n = config.grids[static_cast<std::size_t>(k)];
    const CaseSetup setup = make_case(spec, n, config.interp);
    const StructuredMesh2D& mesh = setup.ops->mesh();
    RunRecord rec;
    rec.case_id = spec.id;
    rec.interp = config.interp;
    rec.n_grid = n;
    rec.dx = mesh.dx();
    if (config.stage == 1) {
      if (setup.scheme->uses_step_scale())
        throw std::invalid_argument("the semi-discrete study needs a step-size independent interpolation");
      const DaeState s = init_consistent(*setup.ops, *setup.scheme);
      const CellVectorField rate = setup.ops->momentum_rhs(0.0, s.u, s.ubar, s.p);
      const FaceVectorField face_rate = face_rhs(*setup.scheme, *setup.ops, 0.0, s.u, s.ubar, s.p);
      rec.u = error_norms(rate, sample_cell_rate(mesh, 0.0, spec.nu));
      rec.ubar = error_norms(face_rate, sample_face_rate(mesh, 0.0, spec.nu));
      rec.p = pressure_error_norms(s.p, sample_pressure(mesh, 0.0, spec.nu));
    } else {
      const ButcherTableau tab = parse_tableau(config.tableau);
      StepperConfig sc;
      sc.method = config.method;
      sc.stage = config.solver.picard_config();
      const Stepper stepper(*setup.ops, *setup.scheme, tab, sc);
      const double t_end = spec.t_end();
      const double h = t_end / config.steps;
      MarchStats stats;
      const DaeState end =
          march(stepper, init_consistent(*setup.ops, *setup.scheme, init_scale(*setup.scheme, tab, h)), t_end,
                config.steps, &stats);
      rec.method = to_string(config.method);
      rec.tableau = tab.name();
      rec.steps = config.steps;
      rec.h = h;
      rec.h_per_stage = h / tab.stages();
      rec.u = error_norms(end.u, sample_cell_velocity(mesh, end.t, spec.nu));
      rec.ubar = error_norms(end.ubar, sample_face_velocity(mesh, end.t, spec.nu));
      rec.p = pressure_error_norms(end.p, sample_pressure(mesh, end.t, spec.nu));
      rec.max_constraint = stats.max_constraint;
      rec.max_constraint_rel = stats.max_constraint_rel;
      rec.max_theta = stats.max_theta;
    }
    res.runs[static_cast<std::size_t>(k)] = rec;
  });
  std::vector<double> spacing;
  for (const RunRecord& r : res.runs) spacing.push_back(r.dx);
  fill_orders(res, spacing);
  return res;
}

GfisdmVariant reference_variant(GfisdmVariant interp) {
  return interp == GfisdmVariant::Choi ? GfisdmVariant::Yu : interp;
}

namespace {

std::string reference_key(const TemporalStudyConfig& c, const CaseSpec& spec) {
  const ReferenceConfig& r = c.reference;
  return "v1 case=" + to_string(spec.id) + " grid=" + std::to_string(c.grid) + " nu=" + fmt(spec.nu) +
         " interp=" + to_string(reference_variant(c.interp)) + " tableau=" + r.tableau +
         " steps=" + std::to_string(r.steps) + " picard=" + std::to_string(r.picard) +
         " piso=" + std::to_string(r.piso) + " ptol=" + fmt(c.solver.pressure_tol) +
         " mtol=" + fmt(c.solver.momentum_tol);
}

std::filesystem::path reference_path(const TemporalStudyConfig& c, const CaseSpec& spec) {
  return std::filesystem::path(c.reference.cache_dir) /
         ("reference_" + to_string(spec.id) + "_" + std::to_string(c.grid) + "_nu" + fmt(spec.nu) + ".bin");
}

template <class F>
void write_field(std::ofstream& out, const F& f) {
  out.write(reinterpret_cast<const char*>(f.values().data()),
            static_cast<std::streamsize>(f.size() * sizeof(double)));
}

template <class F>
bool read_field(std::ifstream& in, F& f) {
  in.read(reinterpret_cast<char*>(f.values().data()), static_cast<std::streamsize>(f.size() * sizeof(double)));
  return static_cast<bool>(in);
}

std::optional<DaeState> load_reference(const std::filesystem::path& path, const std::string& key,
                                       const StructuredMesh2D& mesh) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::string magic, hash, stored_key;
  std::getline(in, magic);
  std::getline(in, hash);
  std::getline(in, stored_key);
  if (magic != "fvdae-reference" || hash != std::to_string(fnv1a(key)) || stored_key != key)
    return std::nullopt;
  DaeState s;
  in.read(reinterpret_cast<char*>(&s.t), sizeof s.t);
  s.u = make_cell_vector(mesh);
  s.ubar = make_face_vector(mesh);
  s.p = make_cell_scalar(mesh);
  if (!in || !read_field(in, s.u) || !read_field(in, s.ubar) || !read_field(in, s.p)) return std::nullopt;
  return s;
}

void store_reference(const std::filesystem::path& path, const std::string& key, const DaeState& s) {
  std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write reference cache " + tmp.string());
    out << "fvdae-reference\n" << std::to_string(fnv1a(key)) << '\n' << key << '\n';
    out.write(reinterpret_cast<const char*>(&s.t), sizeof s.t);
    write_field(out, s.u);
    write_field(out, s.ubar);
    write_field(out, s.p);
    if (!out) throw std::runtime_error("cannot write reference cache " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

DaeState reference_solution(const TemporalStudyConfig& config) {
  const CaseSpec spec = case_spec(config.case_id, config.nu);
  const CaseSetup setup = make_case(spec, config.grid, reference_variant(config.interp));
  const std::string key = reference_key(config, spec);
  const bool cached = !config.reference.cache_dir.empty();
  const std::filesystem::path path = cached ? reference_path(config, spec) : std::filesystem::path{};
  if (cached)
    if (auto s = load_reference(path, key, setup.ops->mesh())) return *s;

  const ButcherTableau tab = parse_tableau(config.reference.tableau);
  StepperConfig sc;
  sc.method = StepMethod::Proposed;
  SolverSettings solver = config.solver;
  solver.picard = config.reference.picard;
  solver.piso = config.reference.piso;
  solver.picard_tol = 0.0;
  sc.stage = solver.picard_config();
  const Stepper stepper(*setup.ops, *setup.scheme, tab, sc);
  DaeState s = march(stepper, init_consistent(*setup.ops, *setup.scheme), spec.t_end(), config.reference.steps);
  if (cached) store_reference(path, key, s);
  return s;
}

StudyResult run_temporal_study(const TemporalStudyConfig& config) {
  if (config.steps.empty()) throw std::invalid_argument("temporal study needs at least one step count");
  const CaseSpec spec = case_spec(config.case_id, config.nu);
  const DaeState ref = reference_solution(config);
  const ButcherTableau tab = parse_tableau(config.tableau);
  StudyResult res;
  res.kind = "temporal";
  res.fields = {"u", "ubar", "p"};
  res.runs.resize(config.steps.size());
  run_parallel(static_cast<int>(config.steps.size()), config.jobs, [&](int k) {
    const int steps = config.steps[static_cast<std::size_t>(k)];
    const CaseSetup setup = make_case(spec, config.grid, config.interp);
    StepperConfig sc;
    sc.method = config.method;
    sc.stage = config.solver.picard_config();
    const Stepper stepper(*setup.ops, *setup.scheme, tab, sc);
    const double t_end = spec.t_end();
    const double h = t_end / steps;
    MarchStats stats;
    const DaeState end = march(stepper, init_consistent(*setup.ops, *setup.scheme, init_scale(*setup.scheme, tab, h)),
                               t_end, steps, &stats);
    RunRecord rec;
    rec.case_id = spec.id;
    rec.interp = config.interp;
    rec.method = to_string(config.method);
    rec.tableau = tab.name();
    rec.n_grid = config.grid;
    rec.steps = steps;
    rec.dx = setup.ops->mesh().dx();
    rec.h = h;
    rec.h_per_stage = h / tab.stages();
    rec.u = error_norms(end.u, ref.u);
    rec.ubar = error_norms(end.ubar, ref.ubar);
    rec.p = pressure_error_norms(end.p, ref.p);
    rec.max_constraint = stats.max_constraint;
    rec.max_constraint_rel = stats.max_constraint_rel;
    rec.max_theta = stats.max_theta;
    res.runs[static_cast<std::size_t>(k)] = rec;
  });
  std::vector<double> spacing;
  for (const RunRecord& r : res.runs) spacing.push_back(r.h);
  fill_orders(res, spacing);
  return res;
}

}  // namespace fvdae
