#include "fvdae/gfisdm.hpp"

#include <array>
#include <stdexcept>
#include <string>

namespace fvdae {

namespace {

inline std::size_t at(Index k) { return static_cast<std::size_t>(k); }

// Order-4 row for face k through cells at owner offsets first..first+3.
// Centred stencils are tried first, then ones shifted away from the boundary.
bool order4_row(const StructuredMesh2D& mesh, Index k, bool avoid_wall_cells, std::vector<Triplet>& out) {
  const int axis = mesh.face(k).axis;
  for (int first : {-1, 0, -2}) {
    const LineStencil st = face_line_cells(mesh, k, first, 4);
    if (st.truncated) continue;
    bool ok = true;
    if (avoid_wall_cells)
      for (Index c : st.cells) ok = ok && !mesh.touches_wall(c, axis);
    if (!ok) continue;
    const std::array<double, 4> nodes{double(first), double(first + 1), double(first + 2), double(first + 3)};
    const std::vector<double> w = lagrange_weights(nodes, 0.5);
    for (std::size_t q = 0; q < 4; ++q) out.push_back({k, st.cells[q], w[q]});
    return true;
  }
  return false;
}

}  // namespace

GfisdmVariant parse_gfisdm_variant(std::string_view name) {
  if (name == "z") return GfisdmVariant::Z;
  if (name == "yu") return GfisdmVariant::Yu;
  if (name == "choi") return GfisdmVariant::Choi;
  if (name == "pascau") return GfisdmVariant::Pascau;
  if (name == "h") return GfisdmVariant::H;
  throw std::invalid_argument("unknown interpolation scheme '" + std::string(name) + "'");
}

std::string to_string(GfisdmVariant v) {
  switch (v) {
    case GfisdmVariant::Z: return "z";
    case GfisdmVariant::Yu: return "yu";
    case GfisdmVariant::Choi: return "choi";
    case GfisdmVariant::Pascau: return "pascau";
    case GfisdmVariant::H: return "h";
  }
  return "?";
}

GfisdmScheme make_gfisdm_scheme(GfisdmVariant variant, const DiscreteOperators& ops) {
  const StructuredMesh2D& mesh = ops.mesh();
  const Index mf = mesh.face_count();
  GfisdmScheme s;
  s.variant = variant;
  const double uniform = variant == GfisdmVariant::Z ? 0.0 : 1.0;
  s.alpha = FaceScalarField(mf, uniform);
  s.beta = FaceScalarField(mf, uniform);
  if (variant != GfisdmVariant::H) return s;

  // alpha = 1 where an order-4 stencil avoids wall cells, whose diagonals carry the
  // ghost closure; the remaining faces use the alpha = 0 form with any order-4 row.
  const bool central = ops.convection_scheme() == ConvectionScheme::Central;
  s.order_diffusion.assign(at(mf), 2);
  s.order_convection.assign(at(mf), 2);
  std::vector<Triplet> rows;
  for (Index k = 0; k < mf; ++k) {
    if (order4_row(mesh, k, true, rows)) {
      s.alpha[k] = 1.0;
      s.beta[k] = central ? 1.0 : 0.0;
      s.order_diffusion[at(k)] = 4;
      continue;
    }
    s.alpha[k] = 0.0;
    s.beta[k] = 0.0;
    if (order4_row(mesh, k, false, rows)) {
      s.order_diffusion[at(k)] = 4;
      continue;
    }
    const FaceRecord& f = mesh.face(k);
    rows.push_back({k, f.owner, 0.5});
    rows.push_back({k, f.neighbor, 0.5});
  }
  s.interp_diffusion = SparseOperator(mf, mesh.cell_count(), std::move(rows));
  if (central) {
    s.interp_convection = s.interp_diffusion;
    s.order_convection = s.order_diffusion;
  } else {
    // the upwind diagonal is not smooth, beta = 0 and linear rows suffice
    s.interp_convection = ops.L2();
  }
  return s;
}

MomentumSplit momentum_split(const DiscreteOperators& ops, const ConvectionAssembly& conv,
                             const CellVectorField& b_K, const CellVectorField& u) {
  const Index m = ops.mesh().cell_count();
  MomentumSplit s{CellScalarField(m), CellScalarField(m), CellVectorField(m), CellVectorField(m)};
  for (Index c = 0; c < m; ++c) {
    const Index slot = ops.diagonal_slot(c);
    s.diag_K[c] = ops.K().values()[at(slot)];
    s.diag_N[c] = conv.N.values()[at(slot)];
  }
  block_diag_apply(ops.K(), u.values(), s.K_part.values());
  vec::axpy(1.0, b_K.values(), s.K_part.values());
  block_diag_apply(conv.N, u.values(), s.N_part.values());
  vec::axpy(1.0, conv.b_wall.values(), s.N_part.values());
  vec::axpy(1.0, conv.b_correction.values(), s.N_part.values());
  return s;
}

MomentumSplit momentum_split(const DiscreteOperators& ops, double t, const CellVectorField& u,
                             const FaceVectorField& ubar) {
  const WallValues wall = ops.mesh().boundary_face_count() ? ops.wall_values(t) : WallValues{};
  const ConvectionAssembly conv = ops.assemble_convection(ubar, wall, u);
  return momentum_split(ops, conv, ops.diffusion_source(wall), u);
}

CellAH eval_cell_AH(const MomentumSplit& split, const CellVectorField& u, double alpha, double beta) {
  const Index m = split.diag_K.points();
  CellAH out{CellScalarField(m), CellVectorField(m)};
  for (Index c = 0; c < m; ++c) out.A[c] = alpha * split.diag_K[c] + beta * split.diag_N[c];
  for (int k = 0; k < kComponents; ++k) {
    const auto kp = split.K_part.component(k);
    const auto np = split.N_part.component(k);
    const auto uc = u.component(k);
    auto h = out.H.component(k);
    for (std::size_t c = 0; c < h.size(); ++c) h[c] = kp[c] + np[c] - out.A.values()[c] * uc[c];
  }
  return out;
}

FaceAH eval_face_AH(const GfisdmScheme& scheme, const DiscreteOperators& ops,
                    const MomentumSplit& split, const CellVectorField& u,
                    std::optional<double> step_scale) {
  const Index mf = ops.mesh().face_count();
  const SparseOperator& L2 = ops.L2();
  FaceAH out{FaceScalarField(mf), FaceVectorField(mf)};

  switch (scheme.variant) {
    case GfisdmVariant::Z: {
      CellVectorField total = lincomb(1.0, split.K_part, 1.0, split.N_part);
      block_diag_apply(L2, total.values(), out.Hbar.values());
      return out;
    }
    case GfisdmVariant::Yu: {
      const CellAH cell = eval_cell_AH(split, u, 1.0, 1.0);
      L2.multiply(cell.A.values(), out.Abar.values());
      block_diag_apply(L2, cell.H.values(), out.Hbar.values());
      return out;
    }
    case GfisdmVariant::Pascau:
    case GfisdmVariant::Choi: {
      const CellAH cell = eval_cell_AH(split, u, 1.0, 1.0);
      const bool choi = scheme.variant == GfisdmVariant::Choi;
      double inv_scale = 0.0;
      if (choi) {
        if (!step_scale || !(*step_scale > 0.0))
          throw std::invalid_argument("the choi interpolation needs a positive step scale");
        inv_scale = 1.0 / *step_scale;
      }
      const Index m = cell.A.points();
      const auto off = L2.row_offsets();
      for (Index f = 0; f < mf; ++f) {
        double den = 0.0;
        std::array<double, kComponents> num{};
        for (Index q = off[at(f)]; q < off[at(f + 1)]; ++q) {
          const Index c = L2.columns()[at(q)];
          const double l = L2.values()[at(q)];
          const double a = cell.A[c];
          // Pascau weights 1/A, Choi weights (1/hγ - A)
          const double w = choi ? inv_scale - a : 1.0 / a;
          if (choi ? w == 0.0 : a == 0.0)
            throw std::domain_error("zero denominator in face interpolation at face " + std::to_string(f));
          if (choi) den += l / w;
          else den += l * w;
          for (int k = 0; k < kComponents; ++k) num[at(k)] += l * w * cell.H[k * m + c];
        }
        if (choi) {
          double wsum = 0.0;
          for (Index q = off[at(f)]; q < off[at(f + 1)]; ++q)
            wsum += L2.values()[at(q)] * (inv_scale - cell.A[L2.columns()[at(q)]]);
          out.Abar[f] = inv_scale - 1.0 / den;
          for (int k = 0; k < kComponents; ++k) out.Hbar[k * mf + f] = num[at(k)] / wsum;
        } else {
          out.Abar[f] = 1.0 / den;
          for (int k = 0; k < kComponents; ++k) out.Hbar[k * mf + f] = num[at(k)] / den;
        }
      }
      return out;
    }
    case GfisdmVariant::H: {
      const Index m = split.diag_K.points();
      FaceScalarField aK(mf), aN(mf);
      scheme.interp_diffusion.multiply(split.diag_K.values(), aK.values());
      scheme.interp_convection.multiply(split.diag_N.values(), aN.values());
      for (Index f = 0; f < mf; ++f) out.Abar[f] = scheme.alpha[f] * aK[f] + scheme.beta[f] * aN[f];
      CellVectorField dKu(m), dNu(m);
      for (int k = 0; k < kComponents; ++k)
        for (Index c = 0; c < m; ++c) {
          dKu[k * m + c] = split.diag_K[c] * u[k * m + c];
          dNu[k * m + c] = split.diag_N[c] * u[k * m + c];
        }
      FaceVectorField hk(mf), hk_diag(mf), hn(mf), hn_diag(mf);
      block_diag_apply(scheme.interp_diffusion, split.K_part.values(), hk.values());
      block_diag_apply(scheme.interp_diffusion, dKu.values(), hk_diag.values());
      block_diag_apply(scheme.interp_convection, split.N_part.values(), hn.values());
      block_diag_apply(scheme.interp_convection, dNu.values(), hn_diag.values());
      for (int k = 0; k < kComponents; ++k)
        for (Index f = 0; f < mf; ++f) {
          const Index i = k * mf + f;
          out.Hbar[i] = hk[i] - scheme.alpha[f] * hk_diag[i] + hn[i] - scheme.beta[f] * hn_diag[i];
        }
      return out;
    }
  }
  return out;
}

FaceVectorField face_rhs(const DiscreteOperators& ops, const FaceAH& ah, const FaceVectorField& ubar,
                         const CellScalarField& p) {
  FaceVectorField out = scale_components(ah.Abar, ubar);
  vec::axpy(1.0, ah.Hbar.values(), out.values());
  ops.Gbar().multiply_add(-1.0, p.values(), out.values());
  return out;
}

FaceVectorField face_rhs(const GfisdmScheme& scheme, const DiscreteOperators& ops, double t,
                         const CellVectorField& u, const FaceVectorField& ubar,
                         const CellScalarField& p, std::optional<double> step_scale) {
  const MomentumSplit split = momentum_split(ops, t, u, ubar);
  return face_rhs(ops, eval_face_AH(scheme, ops, split, u, step_scale), ubar, p);
}

FaceVectorField implicit_face_update(const DiscreteOperators& ops, const FaceAH& ah,
                                     const FaceVectorField& ubar_hist, const CellScalarField& p,
                                     double step_scale) {
  const Index mf = ah.Abar.points();
  FaceVectorField out(mf);
  ops.Gbar().multiply(p.values(), out.values());
  for (int k = 0; k < kComponents; ++k)
    for (Index f = 0; f < mf; ++f) {
      const double den = 1.0 - step_scale * ah.Abar[f];
      if (den == 0.0) throw std::domain_error("singular face coefficient 1 - γĀ at face " + std::to_string(f));
      const Index i = k * mf + f;
      out[i] = (1.0 / den) * (ubar_hist[i] + step_scale * (ah.Hbar[i] - out[i]));
    }
  return out;
}

SteadyResidual steady_residual(const GfisdmScheme& scheme, const DiscreteOperators& ops, double t,
                               const CellVectorField& u, const FaceVectorField& ubar,
                               const CellScalarField& p, std::optional<double> step_scale) {
  SteadyResidual r;
  r.momentum = vec::norm_inf(ops.momentum_rhs(t, u, ubar, p).values());
  r.face = vec::norm_inf(face_rhs(scheme, ops, t, u, ubar, p, step_scale).values());
  CellScalarField div(ops.mesh().cell_count());
  ops.D().multiply(ubar.values(), div.values());
  vec::axpy(-1.0, ops.continuity_value(t).values(), div.values());
  r.continuity = vec::norm_inf(div.values());
  return r;
}

}  // namespace fvdae
