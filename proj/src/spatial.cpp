#include "fvdae/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fvdae {

namespace {

inline std::size_t at(Index k) { return static_cast<std::size_t>(k); }

}  // namespace

std::vector<double> lagrange_weights(std::span<const double> nodes, double x) {
  std::vector<double> w(nodes.size(), 1.0);
  for (std::size_t j = 0; j < nodes.size(); ++j)
    for (std::size_t k = 0; k < nodes.size(); ++k)
      if (k != j) w[j] *= (x - nodes[k]) / (nodes[j] - nodes[k]);
  return w;
}

std::vector<GhostStencil> build_ghost_stencils(const StructuredMesh2D& mesh) {
  std::vector<GhostStencil> out;
  out.reserve(static_cast<std::size_t>(mesh.boundary_face_count()));
  for (const BoundaryFaceRecord& b : mesh.boundary_faces()) {
    GhostStencil g;
    const Index inward = b.side == Side::Low ? 1 : -1;
    for (Index k = 0; k < 3; ++k) {
      const Index c = mesh.shift(b.owner, b.axis, k * inward);
      if (c < 0) break;
      g.cells[at(k)] = c;
      g.count = static_cast<int>(k + 1);
    }
    // distances from the wall in cell widths: wall, then cell centres
    std::vector<double> nodes{0.0};
    for (int k = 0; k < g.count; ++k) nodes.push_back(0.5 + k);
    const auto near = lagrange_weights(nodes, -0.5);
    const auto far = lagrange_weights(nodes, -1.5);
    g.near_wall = near[0];
    g.far_wall = far[0];
    for (int k = 0; k < g.count; ++k) {
      g.near[at(k)] = near[at(k + 1)];
      g.far[at(k)] = far[at(k + 1)];
    }
    out.push_back(g);
  }
  return out;
}

SparseOperator assemble_diffusion(const StructuredMesh2D& mesh, double nu,
                                  std::span<const GhostStencil> ghosts) {
  std::vector<Triplet> t;
  const double vol = mesh.cell_volume();
  for (const FaceRecord& f : mesh.faces()) {
    const double c = nu * f.area / (vol * mesh.spacing(f.axis));
    t.push_back({f.owner, f.owner, -c});
    t.push_back({f.owner, f.neighbor, c});
    t.push_back({f.neighbor, f.neighbor, -c});
    t.push_back({f.neighbor, f.owner, c});
  }
  const auto bfaces = mesh.boundary_faces();
  for (std::size_t k = 0; k < bfaces.size(); ++k) {
    const BoundaryFaceRecord& b = bfaces[k];
    const GhostStencil& g = ghosts[k];
    const double c = nu * b.area / (vol * mesh.spacing(b.axis));
    // flux nu (ghost - P) / spacing; the wall part goes to b_K
    t.push_back({b.owner, b.owner, c * (g.near[0] - 1.0)});
    for (int q = 1; q < g.count; ++q) t.push_back({b.owner, g.cells[at(q)], c * g.near[at(q)]});
  }
  const Index m = mesh.cell_count();
  return SparseOperator(m, m, std::move(t));
}

SparseOperator assemble_gradient_cell(const StructuredMesh2D& mesh) {
  const Index m = mesh.cell_count();
  const double vol = mesh.cell_volume();
  std::vector<Triplet> t;
  for (const FaceRecord& f : mesh.faces()) {
    const Index row_o = f.axis * m + f.owner;
    const Index row_n = f.axis * m + f.neighbor;
    const double w = 0.5 * f.area / vol;
    t.push_back({row_o, f.owner, w});
    t.push_back({row_o, f.neighbor, w});
    t.push_back({row_n, f.owner, -w});
    t.push_back({row_n, f.neighbor, -w});
  }
  // zero normal gradient: the wall face carries the owner value
  for (const BoundaryFaceRecord& b : mesh.boundary_faces())
    t.push_back({b.axis * m + b.owner, b.owner, b.outward_sign() * b.area / vol});
  return SparseOperator(kComponents * m, m, std::move(t));
}

SparseOperator assemble_divergence(const StructuredMesh2D& mesh) {
  const Index m = mesh.cell_count();
  const Index mf = mesh.face_count();
  const double vol = mesh.cell_volume();
  std::vector<Triplet> t;
  for (Index k = 0; k < mf; ++k) {
    const FaceRecord& f = mesh.face(k);
    const Index col = f.axis * mf + k;
    t.push_back({f.owner, col, f.area / vol});
    t.push_back({f.neighbor, col, -f.area / vol});
  }
  return SparseOperator(m, kComponents * mf, std::move(t));
}

SparseOperator assemble_gradient_face(const StructuredMesh2D& mesh, const SparseOperator& G) {
  const Index m = mesh.cell_count();
  const Index mf = mesh.face_count();
  std::vector<Triplet> t;
  const auto off = G.row_offsets();
  for (Index k = 0; k < mf; ++k) {
    const FaceRecord& f = mesh.face(k);
    const double inv = 1.0 / mesh.spacing(f.axis);
    t.push_back({f.axis * mf + k, f.neighbor, inv});
    t.push_back({f.axis * mf + k, f.owner, -inv});
    const int tang = 1 - f.axis;
    for (Index cell : {f.owner, f.neighbor}) {
      const Index row = tang * m + cell;
      for (Index q = off[at(row)]; q < off[at(row + 1)]; ++q)
        t.push_back({tang * mf + k, G.columns()[at(q)], 0.5 * G.values()[at(q)]});
    }
  }
  return SparseOperator(kComponents * mf, m, std::move(t));
}

SparseOperator quick_matrix(const StructuredMesh2D& mesh, std::span<const Upstream> upstream) {
  const Index mf = mesh.face_count();
  std::vector<Triplet> t;
  for (Index k = 0; k < mf; ++k) {
    const FaceRecord& f = mesh.face(k);
    const bool pos = upstream[at(k)] == Upstream::PositiveSide;
    // upstream, centre, downstream
    const LineStencil s = pos ? face_line_cells(mesh, k, 0, 3) : face_line_cells(mesh, k, -1, 3);
    if (s.truncated) {
      t.push_back({k, f.owner, 0.5});
      t.push_back({k, f.neighbor, 0.5});
      continue;
    }
    const Index up = pos ? s.cells[2] : s.cells[0];
    const Index centre = s.cells[1];
    const Index down = pos ? s.cells[0] : s.cells[2];
    t.push_back({k, up, -0.125});
    t.push_back({k, centre, 0.75});
    t.push_back({k, down, 0.375});
  }
  return SparseOperator(mf, mesh.cell_count(), std::move(t));
}

std::vector<Upstream> quick_orientation(const StructuredMesh2D& mesh, const FaceVectorField* flux) {
  const Index mf = mesh.face_count();
  std::vector<Upstream> out(at(mf), Upstream::NegativeSide);
  if (flux)
    for (Index k = 0; k < mf; ++k)
      if ((*flux)[mesh.face(k).axis * mf + k] < 0.0) out[at(k)] = Upstream::PositiveSide;
  return out;
}

SparseOperator interp_matrix(const StructuredMesh2D& mesh, int order,
                             const FaceVectorField* flux_sign_source) {
  const Index mf = mesh.face_count();
  if (order == 3) {
    return quick_matrix(mesh, quick_orientation(mesh, flux_sign_source));
  }
  if (order != 2 && order != 4) throw std::invalid_argument("interpolation order must be 2, 3 or 4");
  std::vector<Triplet> t;
  for (Index k = 0; k < mf; ++k) {
    const FaceRecord& f = mesh.face(k);
    if (order == 4) {
      const LineStencil s = face_line_stencil(mesh, k, 4);
      if (!s.truncated) {
        constexpr std::array<double, 4> w{-1.0 / 16.0, 9.0 / 16.0, 9.0 / 16.0, -1.0 / 16.0};
        for (std::size_t q = 0; q < 4; ++q) t.push_back({k, s.cells[q], w[q]});
        continue;
      }
    }
    t.push_back({k, f.owner, 0.5});
    t.push_back({k, f.neighbor, 0.5});
  }
  return SparseOperator(mf, mesh.cell_count(), std::move(t));
}

void face_laplacian_apply(const StructuredMesh2D& mesh, std::span<const double> coef,
                          std::span<const double> p, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  const double vol = mesh.cell_volume();
  const auto faces = mesh.faces();
  const double wx = mesh.dy() / (vol * mesh.dx());
  const double wy = mesh.dx() / (vol * mesh.dy());
  const Index nxf = mesh.x_face_count();
  for (Index k = 0; k < static_cast<Index>(faces.size()); ++k) {
    const FaceRecord& f = faces[at(k)];
    const double w = coef[at(k)] * (k < nxf ? wx : wy);
    const double flux = w * (p[at(f.neighbor)] - p[at(f.owner)]);
    out[at(f.owner)] -= flux;
    out[at(f.neighbor)] += flux;
  }
}

SparseOperator assemble_face_laplacian(const StructuredMesh2D& mesh, std::span<const double> coef) {
  std::vector<Triplet> t;
  const double vol = mesh.cell_volume();
  for (Index k = 0; k < mesh.face_count(); ++k) {
    const FaceRecord& f = mesh.face(k);
    const double w = coef[at(k)] * f.area / (vol * mesh.spacing(f.axis));
    t.push_back({f.owner, f.owner, w});
    t.push_back({f.owner, f.neighbor, -w});
    t.push_back({f.neighbor, f.neighbor, w});
    t.push_back({f.neighbor, f.owner, -w});
  }
  const Index m = mesh.cell_count();
  return SparseOperator(m, m, std::move(t));
}

DiscreteOperators::DiscreteOperators(StructuredMesh2D mesh, double nu, ConvectionScheme convection,
                                     BoundaryProvider bc)
    : mesh_(std::move(mesh)), nu_(nu), convection_(convection), bc_(std::move(bc)) {
  if (!(nu_ > 0.0)) throw std::invalid_argument("viscosity must be positive");
  if (mesh_.boundary_face_count() > 0 && (!bc_.velocity || !bc_.rate))
    throw std::invalid_argument("Dirichlet walls need wall velocity and rate providers");
  ghosts_ = build_ghost_stencils(mesh_);
  K_ = assemble_diffusion(mesh_, nu_, ghosts_);
  G_ = assemble_gradient_cell(mesh_);
  D_ = assemble_divergence(mesh_);
  Gbar_ = assemble_gradient_face(mesh_, G_);
  L2_ = interp_matrix(mesh_, 2);
  L3_ = interp_matrix(mesh_, 3);
  L4_ = interp_matrix(mesh_, 4);

  const Index m = mesh_.cell_count();
  diag_slots_.resize(at(m));
  for (Index c = 0; c < m; ++c) diag_slots_[at(c)] = K_.find(c, c);
  face_slots_.resize(at(mesh_.face_count()));
  for (Index k = 0; k < mesh_.face_count(); ++k) {
    const FaceRecord& f = mesh_.face(k);
    face_slots_[at(k)] = {K_.find(f.owner, f.owner), K_.find(f.owner, f.neighbor),
                          K_.find(f.neighbor, f.owner), K_.find(f.neighbor, f.neighbor)};
  }
  wall_slots_.resize(ghosts_.size());
  for (std::size_t b = 0; b < ghosts_.size(); ++b) {
    const GhostStencil& g = ghosts_[b];
    auto& s = wall_slots_[b];
    s = {-1, -1, -1, -1};
    for (int q = 0; q < g.count; ++q) s[at(q)] = K_.find(g.cells[0], g.cells[at(q)]);
  }
}

WallValues DiscreteOperators::wall_values(double t) const {
  WallValues w;
  w.velocity.reserve(at(mesh_.boundary_face_count()));
  for (const BoundaryFaceRecord& b : mesh_.boundary_faces()) w.velocity.push_back(bc_.velocity(b.centroid, t));
  return w;
}

WallValues DiscreteOperators::wall_rates(double t) const {
  WallValues w;
  w.velocity.reserve(at(mesh_.boundary_face_count()));
  for (const BoundaryFaceRecord& b : mesh_.boundary_faces()) w.velocity.push_back(bc_.rate(b.centroid, t));
  return w;
}

CellVectorField DiscreteOperators::diffusion_source(double t) const {
  return diffusion_source(wall_values(t));
}

CellVectorField DiscreteOperators::diffusion_source(const WallValues& wall) const {
  CellVectorField b = make_cell_vector(mesh_);
  const Index m = mesh_.cell_count();
  const double vol = mesh_.cell_volume();
  const auto bfaces = mesh_.boundary_faces();
  for (std::size_t k = 0; k < bfaces.size(); ++k) {
    const BoundaryFaceRecord& bf = bfaces[k];
    const double c = nu_ * bf.area / (vol * mesh_.spacing(bf.axis)) * ghosts_[k].near_wall;
    for (int comp = 0; comp < 2; ++comp) b[comp * m + bf.owner] += c * wall.velocity[k][at(comp)];
  }
  return b;
}

double DiscreteOperators::ghost_value(Index bface, std::span<const double> u, double wall, bool far) const {
  const GhostStencil& g = ghosts_[at(bface)];
  double v = (far ? g.far_wall : g.near_wall) * wall;
  for (int q = 0; q < g.count; ++q) v += (far ? g.far[at(q)] : g.near[at(q)]) * u[at(g.cells[at(q)])];
  return v;
}

void DiscreteOperators::add_face_convection(ConvectionAssembly& conv, const FaceVectorField& ubar,
                                            const WallValues& wall) const {
  auto nv = conv.N.values();
  const Index m = mesh_.cell_count();
  const Index mf = mesh_.face_count();
  const double vol = mesh_.cell_volume();
  const bool central = convection_ == ConvectionScheme::Central;
  for (Index k = 0; k < mf; ++k) {
    const FaceRecord& f = mesh_.face(k);
    const double phi = ubar[f.axis * mf + k] * f.area / vol;
    const auto& s = face_slots_[at(k)];
    if (central) {
      nv[at(s[0])] -= 0.5 * phi;
      nv[at(s[1])] -= 0.5 * phi;
      nv[at(s[2])] += 0.5 * phi;
      nv[at(s[3])] += 0.5 * phi;
    } else if (phi >= 0.0) {
      nv[at(s[0])] -= phi;
      nv[at(s[2])] += phi;
    } else {
      nv[at(s[1])] -= phi;
      nv[at(s[3])] += phi;
    }
  }
  const auto bfaces = mesh_.boundary_faces();
  for (std::size_t b = 0; b < bfaces.size(); ++b) {
    const BoundaryFaceRecord& bf = bfaces[b];
    const GhostStencil& g = ghosts_[b];
    const auto& w = wall.velocity[b];
    const double phi_out = bf.outward_sign() * w[at(bf.axis)] * bf.area / vol;
    const auto& s = wall_slots_[b];
    if (central) {
      nv[at(s[0])] -= 0.5 * phi_out * (1.0 + g.near[0]);
      for (int q = 1; q < g.count; ++q) nv[at(s[at(q)])] -= 0.5 * phi_out * g.near[at(q)];
      for (int comp = 0; comp < 2; ++comp)
        conv.b_wall[comp * m + bf.owner] -= 0.5 * phi_out * g.near_wall * w[at(comp)];
    } else if (phi_out >= 0.0) {
      nv[at(s[0])] -= phi_out;
    } else {
      for (int comp = 0; comp < 2; ++comp) conv.b_wall[comp * m + bf.owner] -= phi_out * w[at(comp)];
    }
  }
}

ConvectionAssembly DiscreteOperators::assemble_convection(const FaceVectorField& ubar, double t,
                                                          const CellVectorField& u) const {
  if (mesh_.boundary_face_count() == 0) return assemble_convection(ubar, WallValues{}, u);
  return assemble_convection(ubar, wall_values(t), u);
}

ConvectionAssembly DiscreteOperators::assemble_convection(const FaceVectorField& ubar,
                                                          const WallValues& wall,
                                                          const CellVectorField& u) const {
  if (ubar.points() != mesh_.face_count()) throw std::invalid_argument("assemble_convection: ū has wrong length");
  ConvectionAssembly conv;
  conv.scheme = convection_;
  conv.N = K_;
  std::fill(conv.N.values().begin(), conv.N.values().end(), 0.0);
  conv.b_wall = make_cell_vector(mesh_);
  conv.b_correction = make_cell_vector(mesh_);
  add_face_convection(conv, ubar, wall);
  update_correction(conv, ubar, wall, u);
  return conv;
}

void DiscreteOperators::update_correction(ConvectionAssembly& conv, const FaceVectorField& ubar,
                                          const WallValues& wall, const CellVectorField& u) const {
  conv.b_correction.fill(0.0);
  if (convection_ != ConvectionScheme::FrommDeferredCorrection) return;
  const Index mf = mesh_.face_count();
  const double vol = mesh_.cell_volume();
  const auto bfaces = mesh_.boundary_faces();
  for (int comp = 0; comp < 2; ++comp) {
    const auto uc = u.component(comp);
    auto bc = conv.b_correction.component(comp);
    for (Index k = 0; k < mf; ++k) {
      const FaceRecord& f = mesh_.face(k);
      const double phi = ubar[f.axis * mf + k] * f.area / vol;
      double down, upstream;
      if (phi >= 0.0) {
        down = uc[at(f.neighbor)];
        const Index up = mesh_.shift(f.owner, f.axis, -1);
        if (up >= 0) {
          upstream = uc[at(up)];
        } else {
          const Index b = mesh_.boundary_face_at(f.owner, f.axis, Side::Low);
          upstream = ghost_value(b, uc, wall.velocity[at(b)][at(comp)], false);
        }
      } else {
        down = uc[at(f.owner)];
        const Index up = mesh_.shift(f.neighbor, f.axis, 1);
        if (up >= 0) {
          upstream = uc[at(up)];
        } else {
          const Index b = mesh_.boundary_face_at(f.neighbor, f.axis, Side::High);
          upstream = ghost_value(b, uc, wall.velocity[at(b)][at(comp)], false);
        }
      }
      const double corr = phi * 0.25 * (down - upstream);
      bc[at(f.owner)] -= corr;
      bc[at(f.neighbor)] += corr;
    }
    for (std::size_t b = 0; b < bfaces.size(); ++b) {
      const BoundaryFaceRecord& bf = bfaces[b];
      const GhostStencil& g = ghosts_[b];
      const double w = wall.velocity[b][at(comp)];
      const double phi_out = bf.outward_sign() * wall.velocity[b][at(bf.axis)] * bf.area / vol;
      const double ghost = ghost_value(static_cast<Index>(b), uc, w, false);
      double delta;
      if (phi_out >= 0.0) {
        delta = 0.25 * (ghost - uc[at(g.cells[1])]);
      } else {
        const double ghost2 = ghost_value(static_cast<Index>(b), uc, w, true);
        delta = ghost + 0.25 * (uc[at(g.cells[0])] - ghost2) - w;
      }
      bc[at(bf.owner)] -= phi_out * delta;
    }
  }
}

CellScalarField DiscreteOperators::continuity_value(double t) const {
  CellScalarField r = make_cell_scalar(mesh_);
  if (mesh_.boundary_face_count() == 0) return r;
  const double vol = mesh_.cell_volume();
  const auto bfaces = mesh_.boundary_faces();
  for (const BoundaryFaceRecord& b : bfaces) {
    const auto w = bc_.velocity(b.centroid, t);
    r[b.owner] -= b.outward_sign() * w[at(b.axis)] * b.area / vol;
  }
  return r;
}

CellScalarField DiscreteOperators::continuity_rate(double t) const {
  CellScalarField r = make_cell_scalar(mesh_);
  if (mesh_.boundary_face_count() == 0) return r;
  const double vol = mesh_.cell_volume();
  for (const BoundaryFaceRecord& b : mesh_.boundary_faces()) {
    const auto w = bc_.rate(b.centroid, t);
    r[b.owner] -= b.outward_sign() * w[at(b.axis)] * b.area / vol;
  }
  return r;
}

ContinuitySource DiscreteOperators::continuity_source(double t) const {
  return {continuity_value(t), continuity_rate(t)};
}

CellVectorField DiscreteOperators::momentum_rhs(double t, const CellVectorField& u,
                                                const FaceVectorField& ubar,
                                                const CellScalarField& p) const {
  const WallValues wall = mesh_.boundary_face_count() ? wall_values(t) : WallValues{};
  const ConvectionAssembly conv = assemble_convection(ubar, wall, u);
  SparseOperator KN = K_;
  vec::axpy(1.0, conv.N.values(), KN.values());
  CellVectorField F = make_cell_vector(mesh_);
  block_diag_apply(KN, u.values(), F.values());
  const CellVectorField bK = diffusion_source(wall);
  vec::axpy(1.0, bK.values(), F.values());
  vec::axpy(1.0, conv.b_wall.values(), F.values());
  vec::axpy(1.0, conv.b_correction.values(), F.values());
  G_.multiply_add(-1.0, p.values(), F.values());
  return F;
}

}  // namespace fvdae
