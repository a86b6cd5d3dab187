#pragma once

#include <memory>
#include <vector>

#include "fvdae/fields.hpp"
#include "fvdae/gfisdm.hpp"
#include "fvdae/linear_solvers.hpp"
#include "fvdae/spatial.hpp"

namespace fvdae {

struct PicardConfig {
  int picard_iterations = 2;  // N_p
  int piso_loops = 2;         // N_piso
  // > 0: stop Picard early once max|ū change| falls below this; picard_iterations is then a cap
  double picard_tol = 0.0;
  GaussSeidelControl momentum;
  CgControl pressure{1e-12, 5000};
  bool spectral_preconditioner = true;
  bool record_diagnostics = false;
};

// One implicit stage: U = u_hist + γ F(U, Ū, P), Ū = ū_hist + γ F̄(U, Ū, P), D Ū = r_stage,
// with γ = h a_ii.
struct StageProblem {
  double t = 0.0;
  double step_scale = 0.0;
  const CellVectorField* u_hist = nullptr;
  const FaceVectorField* ubar_hist = nullptr;
  const CellScalarField* r_stage = nullptr;
};

struct StageGuess {
  CellVectorField U;
  FaceVectorField Ubar;  // also the first Picard lag
  CellScalarField P;
};

struct StageDiagnostics {
  int picard = 0;
  int piso = 0;
  int gs_sweeps = 0;
  double momentum_residual = 0.0;  // relative GS residual
  int cg_iterations = 0;
  double pressure_residual = 0.0;   // ‖rhs - S P‖₂ in continuity units
  double pressure_rhs_norm = 0.0;   // ‖projected continuity defect‖₂
  double constraint_residual = 0.0; // ‖D Ū - r_stage‖∞
};

struct StageResult {
  CellVectorField U;
  FaceVectorField Ubar;
  CellScalarField P;
  int picard_done = 0;
  double constraint_residual = 0.0;
  double pressure_residual = 0.0;
  double pressure_rhs_norm = 0.0;
  std::vector<StageDiagnostics> diagnostics;
};

class StageSolver {
public:
  StageSolver(const DiscreteOperators& ops, const GfisdmScheme& scheme, PicardConfig config);

  StageResult solve(const StageProblem& problem, StageGuess guess) const;

  const PicardConfig& config() const { return config_; }
  const DiscreteOperators& operators() const { return *ops_; }
  const GfisdmScheme& scheme() const { return *scheme_; }

private:
  const DiscreteOperators* ops_;
  const GfisdmScheme* scheme_;
  PicardConfig config_;
  std::unique_ptr<SpectralPoissonPreconditioner> precond_;
};

}  // namespace fvdae
