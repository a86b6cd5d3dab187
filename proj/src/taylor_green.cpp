#include "fvdae/taylor_green.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace fvdae {

ExactSample exact_fields(Point x, double t, double nu) {
  const double decay = std::exp(-2.0 * nu * t);
  ExactSample s;
  s.velocity = {-std::cos(x.x) * std::sin(x.y) * decay, std::sin(x.x) * std::cos(x.y) * decay};
  s.pressure = -0.25 * (std::cos(2.0 * x.x) + std::cos(2.0 * x.y)) * decay * decay;
  s.rate = {-2.0 * nu * s.velocity[0], -2.0 * nu * s.velocity[1]};
  return s;
}

CaseId parse_case_id(std::string_view name) {
  if (name == "I" || name == "1") return CaseId::I;
  if (name == "II" || name == "2") return CaseId::II;
  if (name == "III" || name == "3") return CaseId::III;
  if (name == "IV" || name == "4") return CaseId::IV;
  throw std::invalid_argument("unknown case '" + std::string(name) + "' (expected I, II, III or IV)");
}

std::string to_string(CaseId id) {
  switch (id) {
    case CaseId::I: return "I";
    case CaseId::II: return "II";
    case CaseId::III: return "III";
    case CaseId::IV: return "IV";
  }
  return "?";
}

CaseSpec case_spec(CaseId id, std::optional<double> nu) {
  CaseSpec s;
  s.id = id;
  s.walls = id == CaseId::III || id == CaseId::IV;
  s.convection = (id == CaseId::II || id == CaseId::IV) ? ConvectionScheme::FrommDeferredCorrection
                                                        : ConvectionScheme::Central;
  s.nu = nu.value_or(s.convection == ConvectionScheme::Central ? 1.0 : 0.1);
  if (!(s.nu > 0.0)) throw std::invalid_argument("viscosity must be positive");
  return s;
}

BoundaryProvider taylor_green_boundary(double nu) {
  BoundaryProvider bc;
  bc.velocity = [nu](Point x, double t) { return exact_fields(x, t, nu).velocity; };
  bc.rate = [nu](Point x, double t) { return exact_fields(x, t, nu).rate; };
  return bc;
}

StructuredMesh2D taylor_green_mesh(const CaseSpec& spec, Index n) {
  const double two_pi = 2.0 * std::numbers::pi;
  const BoundaryKind kind = spec.walls ? BoundaryKind::Dirichlet : BoundaryKind::Periodic;
  return build_uniform_mesh(n, n, Rectangle{0.0, two_pi, 0.0, two_pi}, {kind, kind});
}

CaseSetup make_case(const CaseSpec& spec, Index n, GfisdmVariant variant) {
  CaseSetup setup;
  setup.spec = spec;
  BoundaryProvider bc = spec.walls ? taylor_green_boundary(spec.nu) : BoundaryProvider{};
  setup.ops = std::make_unique<DiscreteOperators>(taylor_green_mesh(spec, n), spec.nu, spec.convection,
                                                  std::move(bc));
  setup.scheme = std::make_unique<GfisdmScheme>(make_gfisdm_scheme(variant, *setup.ops));
  return setup;
}

namespace {

template <class F, class Points, class Pick>
F sample(Index count, const Points& at_point, Pick pick) {
  F out(count);
  for (Index k = 0; k < count; ++k) {
    const auto v = pick(at_point(k));
    if constexpr (F::components == 1) {
      out[k] = v[0];
    } else {
      out[k] = v[0];
      out[count + k] = v[1];
    }
  }
  return out;
}

}  // namespace

CellVectorField sample_cell_velocity(const StructuredMesh2D& mesh, double t, double nu) {
  return sample<CellVectorField>(
      mesh.cell_count(), [&](Index c) { return mesh.cell_centroid(c); },
      [&](Point x) { return exact_fields(x, t, nu).velocity; });
}

FaceVectorField sample_face_velocity(const StructuredMesh2D& mesh, double t, double nu) {
  return sample<FaceVectorField>(
      mesh.face_count(), [&](Index f) { return mesh.face(f).centroid; },
      [&](Point x) { return exact_fields(x, t, nu).velocity; });
}

CellVectorField sample_cell_rate(const StructuredMesh2D& mesh, double t, double nu) {
  return sample<CellVectorField>(
      mesh.cell_count(), [&](Index c) { return mesh.cell_centroid(c); },
      [&](Point x) { return exact_fields(x, t, nu).rate; });
}

FaceVectorField sample_face_rate(const StructuredMesh2D& mesh, double t, double nu) {
  return sample<FaceVectorField>(
      mesh.face_count(), [&](Index f) { return mesh.face(f).centroid; },
      [&](Point x) { return exact_fields(x, t, nu).rate; });
}

CellScalarField sample_pressure(const StructuredMesh2D& mesh, double t, double nu) {
  return sample<CellScalarField>(
      mesh.cell_count(), [&](Index c) { return mesh.cell_centroid(c); },
      [&](Point x) { return std::array<double, 1>{exact_fields(x, t, nu).pressure}; });
}

DaeState init_consistent(const DiscreteOperators& ops, const GfisdmScheme& scheme,
                         std::optional<double> step_scale, const CgControl& control) {
  const StructuredMesh2D& mesh = ops.mesh();
  const double nu = ops.viscosity();
  DaeState s;
  s.t = 0.0;
  s.u = sample_cell_velocity(mesh, 0.0, nu);
  s.ubar = sample_face_velocity(mesh, 0.0, nu);
  s.p = make_cell_scalar(mesh);

  const MomentumSplit split = momentum_split(ops, 0.0, s.u, s.ubar);
  const FaceAH ah = eval_face_AH(scheme, ops, split, s.u, step_scale);
  FaceVectorField flux = ah.Hbar;
  const Index mf = mesh.face_count();
  for (int k = 0; k < kComponents; ++k)
    for (Index f = 0; f < mf; ++f) flux[k * mf + f] += ah.Abar[f] * s.ubar[k * mf + f];

  // -D Ḡ p = -(D(Āū + H̄) - r'(0))
  CellScalarField rhs = make_cell_scalar(mesh);
  ops.D().multiply(flux.values(), rhs.values());
  vec::axpy(-1.0, ops.continuity_rate(0.0).values(), rhs.values());
  vec::scale(-1.0, rhs.values());

  const FaceScalarField ones(mf, 1.0);
  const std::span<const double> coef = ones.values();
  LinearMap S = [&mesh, coef](std::span<const double> in, std::span<double> out) {
    face_laplacian_apply(mesh, coef, in, out);
  };
  SpectralPoissonPreconditioner pc(mesh);
  LinearMap pre = [&pc](std::span<const double> in, std::span<double> out) { pc.apply(1.0, in, out); };
  conjugate_gradient_singular(S, rhs.values(), s.p.values(), control, &pre);
  vec::remove_mean(s.p.values());
  return s;
}

template <Location L>
NormPair error_norms(const Field<L, kComponents>& numeric, const Field<L, kComponents>& exact) {
  if (numeric.points() != exact.points()) throw std::invalid_argument("error_norms: size mismatch");
  const Index n = numeric.points();
  NormPair out;
  if (n == 0) return out;
  double sum = 0.0;
  for (Index k = 0; k < n; ++k) {
    double e2 = 0.0;
    for (int c = 0; c < kComponents; ++c) {
      const double d = numeric[c * n + k] - exact[c * n + k];
      e2 += d * d;
    }
    sum += e2;
    out.linf = std::max(out.linf, std::sqrt(e2));
  }
  out.l2 = std::sqrt(sum / static_cast<double>(n));
  return out;
}

template NormPair error_norms<Location::Cell>(const CellVectorField&, const CellVectorField&);
template NormPair error_norms<Location::Face>(const FaceVectorField&, const FaceVectorField&);

NormPair pressure_error_norms(const CellScalarField& numeric, const CellScalarField& exact) {
  if (numeric.points() != exact.points()) throw std::invalid_argument("error_norms: size mismatch");
  std::vector<double> e(numeric.size());
  for (std::size_t k = 0; k < e.size(); ++k) e[k] = numeric.values()[k] - exact.values()[k];
  vec::remove_mean(e);
  NormPair out;
  if (e.empty()) return out;
  out.l2 = vec::norm2(e) / std::sqrt(static_cast<double>(e.size()));
  out.linf = vec::norm_inf(e);
  return out;
}

OrderFit observed_order(std::span<const double> errors, std::span<const double> spacings) {
  if (errors.size() != spacings.size() || errors.size() < 2)
    throw std::invalid_argument("observed_order needs at least two matching points");
  OrderFit fit;
  for (std::size_t k = 0; k < errors.size(); ++k)
    if (!(errors[k] > 0.0) || !(spacings[k] > 0.0)) {
      fit.slope = std::numeric_limits<double>::infinity();
      return fit;
    }
  const double n = static_cast<double>(errors.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < errors.size(); ++k) {
    const double x = std::log(spacings[k]);
    const double y = std::log(errors[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) throw std::invalid_argument("observed_order: spacings must differ");
  fit.slope = (n * sxy - sx * sy) / den;
  fit.valid = true;
  return fit;
}

}  // namespace fvdae
