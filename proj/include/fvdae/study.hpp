#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fvdae/stepper.hpp"
#include "fvdae/taylor_green.hpp"

namespace fvdae {

struct SolverSettings {
  int picard = 2;
  int piso = 2;
  double picard_tol = 0.0;
  double pressure_tol = 1e-12;
  double momentum_tol = 1e-12;

  PicardConfig picard_config() const;
};

// One marched or semi-discrete evaluation.
struct RunRecord {
  CaseId case_id = CaseId::I;
  GfisdmVariant interp = GfisdmVariant::Z;
  std::string method;   // empty for semi-discrete evaluations
  std::string tableau;
  Index n_grid = 0;
  int steps = 0;
  double dx = 0.0;
  double h = 0.0;
  double h_per_stage = 0.0;
  // semi-discrete: u', ū', p at t = 0; marched: u, ū, p at the end time
  NormPair u, ubar, p;
  double max_constraint = 0.0;      // max over steps of ‖Dū - r‖∞
  double max_constraint_rel = 0.0;  // same, relative to max_c Σ|D_cf ū_f|
  double max_theta = 0.0;           // max over steps of ‖hθ_s‖∞
};

struct FieldOrder {
  std::string field;
  double slope = 0.0;
  bool valid = false;
};

struct StudyResult {
  std::string kind;                 // "spatial1", "spatial2" or "temporal"
  std::vector<std::string> fields;  // names of the u, ū, p columns
  std::vector<RunRecord> runs;
  std::vector<FieldOrder> orders;   // L2 slopes, same order as `fields`

  const FieldOrder& order(const std::string& field) const;
};

struct MarchStats {
  double max_constraint = 0.0;
  double max_constraint_rel = 0.0;
  double max_theta = 0.0;
};

// n uniform steps from `start` over [start.t, t_end]
DaeState march(const Stepper& stepper, DaeState start, double t_end, int steps, MarchStats* stats = nullptr);

struct SpatialStudyConfig {
  CaseId case_id = CaseId::I;
  std::optional<double> nu;
  GfisdmVariant interp = GfisdmVariant::Z;
  int stage = 1;  // 1: t = 0 derivatives, 2: marched to the end time
  std::vector<Index> grids{16, 32, 64, 128, 256};
  StepMethod method = StepMethod::Proposed;
  std::string tableau = "sdirk3";
  int steps = 512;
  SolverSettings solver;
  int jobs = 1;
};

StudyResult run_spatial_study(const SpatialStudyConfig& config);

struct ReferenceConfig {
  int steps = 2048;
  std::string tableau = "sdirk3";
  int picard = 4;
  int piso = 2;
  std::string cache_dir;  // empty: no disk cache
};

struct TemporalStudyConfig {
  CaseId case_id = CaseId::I;
  std::optional<double> nu;
  GfisdmVariant interp = GfisdmVariant::H;
  StepMethod method = StepMethod::Proposed;
  std::string tableau = "sdirk3";
  Index grid = 16;
  std::vector<int> steps{8, 16, 32, 64, 128, 256};
  SolverSettings solver;
  ReferenceConfig reference;
  int jobs = 1;
};

// Choi depends on the step size; its reference is taken with Yu, its h -> 0 limit.
GfisdmVariant reference_variant(GfisdmVariant interp);

// Reference end state for a temporal study, read from or written to the cache when enabled.
DaeState reference_solution(const TemporalStudyConfig& config);

StudyResult run_temporal_study(const TemporalStudyConfig& config);

// Runs tasks 0..count-1 on up to `jobs` threads; the first exception is rethrown.
void run_parallel(int count, int jobs, const std::function<void(int)>& task);

}  // namespace fvdae
