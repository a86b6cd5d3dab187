#pragma once

#include <array>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "fvdae/fields.hpp"
#include "fvdae/gfisdm.hpp"
#include "fvdae/linear_solvers.hpp"
#include "fvdae/spatial.hpp"
#include "fvdae/stepper.hpp"

namespace fvdae {

// Decaying vortex on [0, 2π]²:
//   u = (-cos x sin y, sin x cos y) e^{-2νt},  p = -(cos 2x + cos 2y) e^{-4νt} / 4
struct ExactSample {
  std::array<double, 2> velocity{};
  double pressure = 0.0;
  std::array<double, 2> rate{};  // du/dt
};

ExactSample exact_fields(Point x, double t, double nu);

enum class CaseId { I, II, III, IV };

CaseId parse_case_id(std::string_view name);
std::string to_string(CaseId id);

struct CaseSpec {
  CaseId id = CaseId::I;
  bool walls = false;
  ConvectionScheme convection = ConvectionScheme::Central;
  double nu = 1.0;

  double t_end() const { return 0.1 / nu; }
};

// I periodic/central, II periodic/FROMM, III walls/central, IV walls/FROMM.
// Default ν is 1 for central and 0.1 for FROMM.
CaseSpec case_spec(CaseId id, std::optional<double> nu = std::nullopt);

BoundaryProvider taylor_green_boundary(double nu);
StructuredMesh2D taylor_green_mesh(const CaseSpec& spec, Index n);

// Operators and interpolation scheme with stable addresses for solvers that keep pointers.
struct CaseSetup {
  CaseSpec spec;
  std::unique_ptr<DiscreteOperators> ops;
  std::unique_ptr<GfisdmScheme> scheme;
};

CaseSetup make_case(const CaseSpec& spec, Index n, GfisdmVariant variant);

CellVectorField sample_cell_velocity(const StructuredMesh2D& mesh, double t, double nu);
FaceVectorField sample_face_velocity(const StructuredMesh2D& mesh, double t, double nu);
CellVectorField sample_cell_rate(const StructuredMesh2D& mesh, double t, double nu);
FaceVectorField sample_face_rate(const StructuredMesh2D& mesh, double t, double nu);
CellScalarField sample_pressure(const StructuredMesh2D& mesh, double t, double nu);

// Exact u, ū at t = 0 and the pressure solving D F̄(0, u, ū, p) = r'(0).
// `step_scale` is forwarded to h-dependent interpolations (Choi).
DaeState init_consistent(const DiscreteOperators& ops, const GfisdmScheme& scheme,
                         std::optional<double> step_scale = std::nullopt,
                         const CgControl& control = CgControl{1e-13, 20000});

struct NormPair {
  double l2 = 0.0;
  double linf = 0.0;
};

// Per-point Euclidean magnitude of the difference; equal point weights.
template <Location L>
NormPair error_norms(const Field<L, kComponents>& numeric, const Field<L, kComponents>& exact);
// Mean of (numeric - exact) removed first.
NormPair pressure_error_norms(const CellScalarField& numeric, const CellScalarField& exact);

struct OrderFit {
  double slope = 0.0;
  bool valid = false;  // false when an error is nonpositive; slope is then +inf
};

// Least-squares slope of log(error) against log(spacing).
OrderFit observed_order(std::span<const double> errors, std::span<const double> spacings);

}  // namespace fvdae
