#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fvdae/fields.hpp"
#include "fvdae/spatial.hpp"

namespace fvdae {

enum class GfisdmVariant { Z, Yu, Choi, Pascau, H };

GfisdmVariant parse_gfisdm_variant(std::string_view name);
std::string to_string(GfisdmVariant v);

// Face momentum interpolation configuration.
struct GfisdmScheme {
  GfisdmVariant variant = GfisdmVariant::Z;
  FaceScalarField alpha;
  FaceScalarField beta;
  // H only: per-face interpolation rows for the diffusion and convection parts.
  // Order 4 wherever four cells line up along the face axis, order 2 otherwise.
  SparseOperator interp_diffusion;
  SparseOperator interp_convection;
  std::vector<int> order_diffusion;
  std::vector<int> order_convection;

  bool uses_step_scale() const { return variant == GfisdmVariant::Choi; }
};

GfisdmScheme make_gfisdm_scheme(GfisdmVariant variant, const DiscreteOperators& ops);

// Cell pieces of the momentum operator at one (u, ū, t).
struct MomentumSplit {
  CellScalarField diag_K;
  CellScalarField diag_N;
  CellVectorField K_part;  // {K}u + b_K
  CellVectorField N_part;  // {N}u + b_N
};

MomentumSplit momentum_split(const DiscreteOperators& ops, const ConvectionAssembly& conv,
                             const CellVectorField& b_K, const CellVectorField& u);
MomentumSplit momentum_split(const DiscreteOperators& ops, double t, const CellVectorField& u,
                             const FaceVectorField& ubar);

struct CellAH {
  CellScalarField A;
  CellVectorField H;
};

struct FaceAH {
  FaceScalarField Abar;
  FaceVectorField Hbar;
};

// A_i = alpha diag(K) + beta diag(N); H_i = {K+N}u + b - {diag A_i}u
CellAH eval_cell_AH(const MomentumSplit& split, const CellVectorField& u, double alpha, double beta);

// step_scale is h*a_ii of the active stage; only the Choi variant reads it.
FaceAH eval_face_AH(const GfisdmScheme& scheme, const DiscreteOperators& ops,
                    const MomentumSplit& split, const CellVectorField& u,
                    std::optional<double> step_scale = std::nullopt);

// ū' = {diag Ā}ū + H̄ - Ḡp
FaceVectorField face_rhs(const DiscreteOperators& ops, const FaceAH& ah, const FaceVectorField& ubar,
                         const CellScalarField& p);
FaceVectorField face_rhs(const GfisdmScheme& scheme, const DiscreteOperators& ops, double t,
                         const CellVectorField& u, const FaceVectorField& ubar,
                         const CellScalarField& p, std::optional<double> step_scale = std::nullopt);

// Implicit face update of one stage: Ā* (ū_hist + γ(H̄ - Ḡp)) with Ā* = 1/(1 - γĀ).
FaceVectorField implicit_face_update(const DiscreteOperators& ops, const FaceAH& ah,
                                     const FaceVectorField& ubar_hist, const CellScalarField& p,
                                     double step_scale);

struct SteadyResidual {
  double momentum = 0.0;    // ‖F‖∞
  double face = 0.0;        // ‖F̄‖∞
  double continuity = 0.0;  // ‖Dū - r‖∞
};

SteadyResidual steady_residual(const GfisdmScheme& scheme, const DiscreteOperators& ops, double t,
                               const CellVectorField& u, const FaceVectorField& ubar,
                               const CellScalarField& p, std::optional<double> step_scale = std::nullopt);

}  // namespace fvdae
