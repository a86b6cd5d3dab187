#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "fvdae/fields.hpp"
#include "fvdae/stage_solver.hpp"
#include "fvdae/tableau.hpp"

namespace fvdae {

struct DaeState {
  double t = 0.0;
  CellVectorField u;
  FaceVectorField ubar;
  CellScalarField p;
};

enum class StepMethod { Direct, Proposed, LowStorage1, LowStorage2 };

StepMethod parse_step_method(std::string_view name);
std::string to_string(StepMethod m);

struct StepperConfig {
  StepMethod method = StepMethod::Proposed;
  PicardConfig stage;
  // loud failure threshold for ‖Dū - r(t)‖∞ on entry
  double consistency_tol = 1e-8;
};

struct StepDiagnostics {
  double constraint_residual = 0.0;  // ‖D ū_{n+1} - r(t_{n+1})‖∞
  double pressure_residual = 0.0;    // last stage, continuity units
  double pressure_rhs_norm = 0.0;
  double theta_last = 0.0;           // ‖h θ_s‖∞ of the proposed constraint
  int picard_total = 0;
  std::vector<StageDiagnostics> stages;
};

class Stepper {
public:
  Stepper(const DiscreteOperators& ops, const GfisdmScheme& scheme, ButcherTableau tableau,
          StepperConfig config);

  DaeState step(const DaeState& state, double h, StepDiagnostics* diag = nullptr) const;

  const ButcherTableau& tableau() const { return tab_; }
  const StepperConfig& config() const { return config_; }
  const DiscreteOperators& operators() const { return *ops_; }

private:
  DaeState step_full_storage(const DaeState& state, double h, bool proposed, StepDiagnostics* diag) const;
  DaeState step_low_storage_1(const DaeState& state, double h, StepDiagnostics* diag) const;
  DaeState step_low_storage_2(const DaeState& state, double h, StepDiagnostics* diag) const;
  StageResult solve_stage(double t, double scale, const CellVectorField& u_hist,
                          const FaceVectorField& ubar_hist, const CellScalarField& r,
                          const CellVectorField& U, const FaceVectorField& Ubar,
                          const CellScalarField& P, StepDiagnostics* diag) const;
  void check_consistent(const DaeState& state) const;
  void finish(const DaeState& out, StepDiagnostics* diag) const;

  const DiscreteOperators* ops_;
  ButcherTableau tab_;
  StepperConfig config_;
  StageSolver solver_;
};

}  // namespace fvdae
