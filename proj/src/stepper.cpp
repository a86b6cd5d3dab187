#include "fvdae/stepper.hpp"

#include <cstdio>
#include <stdexcept>

namespace fvdae {

namespace {

// y <- y + w (x - y)
template <class F>
void blend(F& y, double w, const F& x) {
  auto yv = y.values();
  const auto xv = x.values();
  for (std::size_t i = 0; i < yv.size(); ++i) yv[i] += w * (xv[i] - yv[i]);
}

}  // namespace

StepMethod parse_step_method(std::string_view name) {
  if (name == "direct") return StepMethod::Direct;
  if (name == "proposed") return StepMethod::Proposed;
  if (name == "ls1") return StepMethod::LowStorage1;
  if (name == "ls2") return StepMethod::LowStorage2;
  throw std::invalid_argument("unknown method '" + std::string(name) + "'");
}

std::string to_string(StepMethod m) {
  switch (m) {
    case StepMethod::Direct: return "direct";
    case StepMethod::Proposed: return "proposed";
    case StepMethod::LowStorage1: return "ls1";
    case StepMethod::LowStorage2: return "ls2";
  }
  return "?";
}

Stepper::Stepper(const DiscreteOperators& ops, const GfisdmScheme& scheme, ButcherTableau tableau,
                 StepperConfig config)
    : ops_(&ops), tab_(std::move(tableau)), config_(config), solver_(ops, scheme, config.stage) {
  switch (config_.method) {
    case StepMethod::Direct: break;
    case StepMethod::Proposed:
      if (!tab_.stiff_accurate())
        throw std::invalid_argument("the proposed method is implemented for stiff-accurate tableaux only; " +
                                    tab_.name() + " is not stiff-accurate");
      break;
    case StepMethod::LowStorage1:
      if (!tab_.low_storage_family1())
        throw std::invalid_argument("tableau " + tab_.name() + " does not have the first low-storage shape");
      break;
    case StepMethod::LowStorage2:
      if (!tab_.low_storage_family2())
        throw std::invalid_argument("tableau " + tab_.name() + " does not have the second low-storage shape");
      break;
  }
}

void Stepper::check_consistent(const DaeState& state) const {
  CellScalarField div(ops_->mesh().cell_count());
  ops_->D().multiply(state.ubar.values(), div.values());
  vec::axpy(-1.0, ops_->continuity_value(state.t).values(), div.values());
  const double err = vec::norm_inf(div.values());
  if (!(err <= config_.consistency_tol))
  {
    char msg[160];
    std::snprintf(msg, sizeof msg, "inconsistent state at t=%.6g: |D ubar - r| = %.3e, max |ubar| = %.3e", state.t,
                  err, vec::norm_inf(state.ubar.values()));
    throw std::runtime_error(msg);
  }
}

StageResult Stepper::solve_stage(double t, double scale, const CellVectorField& u_hist,
                                 const FaceVectorField& ubar_hist, const CellScalarField& r,
                                 const CellVectorField& U, const FaceVectorField& Ubar,
                                 const CellScalarField& P, StepDiagnostics* diag) const {
  StageProblem prob{t, scale, &u_hist, &ubar_hist, &r};
  StageResult res = solver_.solve(prob, StageGuess{U, Ubar, P});
  if (diag) {
    diag->picard_total += res.picard_done;
    diag->pressure_residual = res.pressure_residual;
    diag->pressure_rhs_norm = res.pressure_rhs_norm;
    diag->stages.insert(diag->stages.end(), res.diagnostics.begin(), res.diagnostics.end());
  }
  return res;
}

void Stepper::finish(const DaeState& out, StepDiagnostics* diag) const {
  if (!diag) return;
  CellScalarField div(ops_->mesh().cell_count());
  ops_->D().multiply(out.ubar.values(), div.values());
  vec::axpy(-1.0, ops_->continuity_value(out.t).values(), div.values());
  diag->constraint_residual = vec::norm_inf(div.values());
}

DaeState Stepper::step(const DaeState& state, double h, StepDiagnostics* diag) const {
  if (!(h > 0.0)) throw std::invalid_argument("step size must be positive");
  check_consistent(state);
  if (diag) *diag = StepDiagnostics{};
  switch (config_.method) {
    case StepMethod::Direct: return step_full_storage(state, h, false, diag);
    case StepMethod::Proposed: return step_full_storage(state, h, true, diag);
    case StepMethod::LowStorage1: return step_low_storage_1(state, h, diag);
    case StepMethod::LowStorage2: return step_low_storage_2(state, h, diag);
  }
  return state;
}

DaeState Stepper::step_full_storage(const DaeState& state, double h, bool proposed, StepDiagnostics* diag) const {
  const int s = tab_.stages();
  const double tn = state.t;
  const CellScalarField r_n = ops_->continuity_value(tn);
  std::vector<CellScalarField> rate;
  for (int j = 0; j < s; ++j) rate.push_back(ops_->continuity_rate(tn + tab_.c(j) * h));

  // h θ_s chosen so that the last stage constraint is r(t_{n+1})
  CellScalarField h_theta(r_n.points());
  if (proposed) {
    const CellScalarField r_end = ops_->continuity_value(tn + h);
    for (Index c = 0; c < r_n.points(); ++c) {
      double q = 0.0;
      for (int j = 0; j < s; ++j) q += tab_.b(j) * rate[static_cast<std::size_t>(j)][c];
      h_theta[c] = (r_end[c] - r_n[c] - h * q) / tab_.b(s - 1);
    }
    if (diag) diag->theta_last = vec::norm_inf(h_theta.values());
  }

  std::vector<CellVectorField> U;
  std::vector<FaceVectorField> Ubar;
  std::vector<CellScalarField> P;
  for (int i = 0; i < s; ++i) {
    CellVectorField u_hist = state.u;
    FaceVectorField ubar_hist = state.ubar;
    for (int k = 0; k < i; ++k) {
      double d = 0.0;
      for (int j = k; j < i; ++j) d += tab_.a(i, j) * tab_.inverse(j, k);
      if (d == 0.0) continue;
      auto uh = u_hist.values();
      const auto uk = U[static_cast<std::size_t>(k)].values();
      const auto un = state.u.values();
      for (std::size_t q = 0; q < uh.size(); ++q) uh[q] += d * (uk[q] - un[q]);
      auto bh = ubar_hist.values();
      const auto bk = Ubar[static_cast<std::size_t>(k)].values();
      const auto bn = state.ubar.values();
      for (std::size_t q = 0; q < bh.size(); ++q) bh[q] += d * (bk[q] - bn[q]);
    }
    const double ti = tn + tab_.c(i) * h;
    CellScalarField r_stage;
    if (proposed) {
      r_stage = r_n;
      for (int j = 0; j <= i; ++j) vec::axpy(h * tab_.a(i, j), rate[static_cast<std::size_t>(j)].values(), r_stage.values());
      if (i == s - 1) vec::axpy(tab_.a(i, i), h_theta.values(), r_stage.values());
    } else {
      r_stage = ops_->continuity_value(ti);
    }
    const CellVectorField& gu = i == 0 ? state.u : U.back();
    const FaceVectorField& gb = i == 0 ? state.ubar : Ubar.back();
    const CellScalarField& gp = i == 0 ? state.p : P.back();
    StageResult res = solve_stage(ti, h * tab_.a(i, i), u_hist, ubar_hist, r_stage, gu, gb, gp, diag);
    U.push_back(std::move(res.U));
    Ubar.push_back(std::move(res.Ubar));
    P.push_back(std::move(res.P));
  }

  DaeState out;
  out.t = tn + h;
  if (tab_.stiff_accurate()) {
    out.u = std::move(U.back());
    out.ubar = std::move(Ubar.back());
    out.p = std::move(P.back());
  } else {
    out.u = state.u;
    out.ubar = state.ubar;
    out.p = state.p;
    for (int j = 0; j < s; ++j) {
      double w = 0.0;
      for (int i = 0; i < s; ++i) w += tab_.b(i) * tab_.inverse(i, j);
      const auto sj = static_cast<std::size_t>(j);
      vec::axpy(w, U[sj].values(), out.u.values());
      vec::axpy(-w, state.u.values(), out.u.values());
      vec::axpy(w, Ubar[sj].values(), out.ubar.values());
      vec::axpy(-w, state.ubar.values(), out.ubar.values());
      vec::axpy(w, P[sj].values(), out.p.values());
      vec::axpy(-w, state.p.values(), out.p.values());
    }
  }
  finish(out, diag);
  return out;
}

DaeState Stepper::step_low_storage_1(const DaeState& state, double h, StepDiagnostics* diag) const {
  const int s = tab_.stages();
  const double tn = state.t;
  // registers: y = (u, ū), y* = (u*, ū*), r, r*, z = p
  CellVectorField u = state.u, u_star;
  FaceVectorField ubar = state.ubar, ubar_star;
  CellScalarField p = state.p;
  CellScalarField r = ops_->continuity_value(tn), r_star;
  for (int i = 0; i < s; ++i) {
    if (i == 0) {
      u_star = u;
      ubar_star = ubar;
      r_star = r;
    } else {
      const double w = tab_.b(i - 1) * tab_.inverse(i - 1, i - 1);
      blend(u_star, w, u);
      blend(ubar_star, w, ubar);
      blend(r_star, w, r);
    }
    const double ti = tn + tab_.c(i) * h;
    if (i == s - 1) {
      r = ops_->continuity_value(tn + h);
    } else {
      r = r_star;
      vec::axpy(h * tab_.a(i, i), ops_->continuity_rate(ti).values(), r.values());
    }
    StageResult res = solve_stage(ti, h * tab_.a(i, i), u_star, ubar_star, r, u, ubar, p, diag);
    u = std::move(res.U);
    ubar = std::move(res.Ubar);
    p = std::move(res.P);
  }
  DaeState out{tn + h, std::move(u), std::move(ubar), std::move(p)};
  finish(out, diag);
  return out;
}

DaeState Stepper::step_low_storage_2(const DaeState& state, double h, StepDiagnostics* diag) const {
  const int s = tab_.stages();
  const double tn = state.t;
  // registers: y, y*, y** (velocity pairs), r, r*, r**, z
  CellVectorField u = state.u, u_star, u_star2;
  FaceVectorField ubar = state.ubar, ubar_star, ubar_star2;
  CellScalarField p = state.p;
  CellScalarField r = ops_->continuity_value(tn), r_star, r_star2;
  for (int i = 0; i < s; ++i) {
    const double ti = tn + tab_.c(i) * h;
    if (i == 0) {
      u_star = u;
      u_star2 = u;
      ubar_star = ubar;
      ubar_star2 = ubar;
      r_star = r;
      r_star2 = r;
      // the first stage constraint also advances with r'
      if (s > 1) vec::axpy(h * tab_.a(0, 0), ops_->continuity_rate(ti).values(), r.values());
      else r = ops_->continuity_value(tn + h);
    } else {
      const double sub = tab_.a(i, i - 1);
      const double w = sub * tab_.inverse(i - 1, i - 1);
      // y* <- y** + a_{i,i-1} ω_{i-1,i-1} (y - y*)
      auto advance = [w](auto& star, const auto& star2, const auto& y) {
        auto sv = star.values();
        const auto s2 = star2.values();
        const auto yv = y.values();
        for (std::size_t q = 0; q < sv.size(); ++q) sv[q] = s2[q] + w * (yv[q] - sv[q]);
      };
      advance(u_star, u_star2, u);
      advance(ubar_star, ubar_star2, ubar);
      advance(r_star, r_star2, r);
      if (i < s - 1) {
        const double wb = tab_.b(i - 1) / sub;
        blend(u_star2, wb, u_star);
        blend(ubar_star2, wb, ubar_star);
        blend(r_star2, wb, r_star);
        r = r_star;
        vec::axpy(h * tab_.a(i, i), ops_->continuity_rate(ti).values(), r.values());
      } else {
        r = ops_->continuity_value(tn + h);
      }
    }
    StageResult res = solve_stage(ti, h * tab_.a(i, i), u_star, ubar_star, r, u, ubar, p, diag);
    u = std::move(res.U);
    ubar = std::move(res.Ubar);
    p = std::move(res.P);
  }
  DaeState out{tn + h, std::move(u), std::move(ubar), std::move(p)};
  finish(out, diag);
  return out;
}

}  // namespace fvdae
