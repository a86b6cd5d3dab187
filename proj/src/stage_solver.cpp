#include "fvdae/stage_solver.hpp"

#include <cmath>
#include <stdexcept>

namespace fvdae {

namespace {

inline std::size_t at(Index k) { return static_cast<std::size_t>(k); }

void check_finite(std::span<const double> v, const char* what) {
  if (!vec::all_finite(v)) throw SolverError(std::string("stage solve diverged: non-finite ") + what);
}

}  // namespace

StageSolver::StageSolver(const DiscreteOperators& ops, const GfisdmScheme& scheme, PicardConfig config)
    : ops_(&ops), scheme_(&scheme), config_(config) {
  if (config_.picard_iterations < 1 || config_.piso_loops < 1)
    throw std::invalid_argument("Picard and PISO counts must be at least 1");
  if (config_.spectral_preconditioner) precond_ = std::make_unique<SpectralPoissonPreconditioner>(ops.mesh());
}

StageResult StageSolver::solve(const StageProblem& prob, StageGuess guess) const {
  const DiscreteOperators& ops = *ops_;
  const StructuredMesh2D& mesh = ops.mesh();
  const Index m = mesh.cell_count();
  const Index mf = mesh.face_count();
  const double g = prob.step_scale;
  if (!(g > 0.0)) throw std::invalid_argument("stage solve needs a positive step scale");
  if (!prob.u_hist || !prob.ubar_hist || !prob.r_stage) throw std::invalid_argument("stage problem is incomplete");
  const CellVectorField& u_hist = *prob.u_hist;
  const FaceVectorField& ubar_hist = *prob.ubar_hist;
  const CellScalarField& r_stage = *prob.r_stage;

  const WallValues wall = mesh.boundary_face_count() ? ops.wall_values(prob.t) : WallValues{};
  const CellVectorField bK = ops.diffusion_source(wall);

  StageResult res;
  res.U = std::move(guess.U);
  res.Ubar = std::move(guess.Ubar);
  res.P = std::move(guess.P);
  FaceVectorField lag = res.Ubar;

  CellVectorField rhs(m), gradP(m), H(m);
  CellScalarField A(m), Astar(m), defect(m), Sp(m);
  FaceScalarField Abar_star(mf);
  FaceVectorField face_star(mf);
  std::vector<double> cg_rhs(at(m));

  for (int picard = 1; picard <= config_.picard_iterations; ++picard) {
    ConvectionAssembly conv = ops.assemble_convection(lag, wall, res.U);

    // momentum predictor: (I - γ(K+N)) U = u_hist + γ(b - G P)
    SparseOperator M = ops.K();
    {
      auto mv = M.values();
      const auto nv = conv.N.values();
      for (std::size_t q = 0; q < mv.size(); ++q) mv[q] = -g * (mv[q] + nv[q]);
      for (Index c = 0; c < m; ++c) mv[at(ops.diagonal_slot(c))] += 1.0;
    }
    ops.G().multiply(res.P.values(), gradP.values());
    for (std::size_t i = 0; i < rhs.size(); ++i)
      rhs.values()[i] = u_hist.values()[i] +
                        g * (bK.values()[i] + conv.b_wall.values()[i] + conv.b_correction.values()[i] -
                             gradP.values()[i]);
    GaussSeidelReport gs;
    for (int k = 0; k < 2; ++k) {
      const GaussSeidelReport rk = gauss_seidel(M, rhs.component(k), res.U.component(k), config_.momentum);
      gs.sweeps = std::max(gs.sweeps, rk.sweeps);
      gs.rel_residual = std::max(gs.rel_residual, rk.rel_residual);
    }
    check_finite(res.U.values(), "predicted velocity");

    for (int piso = 1; piso <= config_.piso_loops; ++piso) {
      ops.update_correction(conv, lag, wall, res.U);
      const MomentumSplit split = momentum_split(ops, conv, bK, res.U);
      for (Index c = 0; c < m; ++c) {
        A[c] = split.diag_K[c] + split.diag_N[c];
        Astar[c] = 1.0 / (1.0 - g * A[c]);
      }
      for (int k = 0; k < kComponents; ++k)
        for (Index c = 0; c < m; ++c) {
          const Index i = k * m + c;
          H[i] = split.K_part[i] + split.N_part[i] - A[c] * res.U[i];
        }
      const FaceAH ah = eval_face_AH(*scheme_, ops, split, res.U, g);
      for (Index f = 0; f < mf; ++f) {
        const double den = 1.0 - g * ah.Abar[f];
        if (den == 0.0) throw SolverError("singular face coefficient 1 - γĀ at face " + std::to_string(f));
        Abar_star[f] = 1.0 / den;
      }
      for (int k = 0; k < kComponents; ++k)
        for (Index f = 0; f < mf; ++f) {
          const Index i = k * mf + f;
          face_star[i] = Abar_star[f] * (ubar_hist[i] + g * ah.Hbar[i]);
        }

      // pressure: S P = -(D ū* - r)/γ with S = -D{Ā*}Ḡ
      ops.D().multiply(face_star.values(), defect.values());
      vec::axpy(-1.0, r_stage.values(), defect.values());
      for (Index c = 0; c < m; ++c) cg_rhs[at(c)] = -defect[c] / g;
      const std::span<const double> coef = Abar_star.values();
      LinearMap S = [&mesh, coef](std::span<const double> in, std::span<double> out) {
        face_laplacian_apply(mesh, coef, in, out);
      };
      LinearMap pre;
      if (precond_) {
        const double mean_coef = vec::mean(coef);
        const SpectralPoissonPreconditioner* pc = precond_.get();
        pre = [pc, mean_coef](std::span<const double> in, std::span<double> out) { pc->apply(mean_coef, in, out); };
      }
      const CgReport cg = conjugate_gradient_singular(S, cg_rhs, res.P.values(), config_.pressure,
                                                      precond_ ? &pre : nullptr);

      // corrector
      ops.G().multiply(res.P.values(), gradP.values());
      for (int k = 0; k < kComponents; ++k)
        for (Index c = 0; c < m; ++c) {
          const Index i = k * m + c;
          res.U[i] = Astar[c] * (u_hist[i] + g * (H[i] - gradP[i]));
        }
      res.Ubar = implicit_face_update(ops, ah, ubar_hist, res.P, g);
      check_finite(res.U.values(), "velocity");
      check_finite(res.Ubar.values(), "face velocity");

      res.pressure_residual = g * cg.residual_norm;
      res.pressure_rhs_norm = g * cg.rhs_norm;
      if (config_.record_diagnostics) {
        ops.D().multiply(res.Ubar.values(), Sp.values());
        vec::axpy(-1.0, r_stage.values(), Sp.values());
        res.diagnostics.push_back({picard, piso, gs.sweeps, gs.rel_residual, cg.iterations,
                                   res.pressure_residual, res.pressure_rhs_norm, vec::norm_inf(Sp.values())});
      }
    }
    res.picard_done = picard;
    double change = 0.0;
    for (std::size_t i = 0; i < lag.size(); ++i)
      change = std::max(change, std::abs(res.Ubar.values()[i] - lag.values()[i]));
    lag = res.Ubar;
    if (config_.picard_tol > 0.0 && change <= config_.picard_tol) break;
  }

  ops.D().multiply(res.Ubar.values(), defect.values());
  vec::axpy(-1.0, r_stage.values(), defect.values());
  res.constraint_residual = vec::norm_inf(defect.values());
  return res;
}

}  // namespace fvdae
