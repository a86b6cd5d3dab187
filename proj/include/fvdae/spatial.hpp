#pragma once

#include <array>
#include <functional>
#include <vector>

#include "fvdae/fields.hpp"
#include "fvdae/mesh.hpp"
#include "fvdae/sparse.hpp"

namespace fvdae {

enum class ConvectionScheme { Central, FrommDeferredCorrection };
enum class PressureBc { ZeroGradient, Periodic };

using WallVelocityFn = std::function<std::array<double, 2>(Point, double)>;

// Dirichlet wall velocity and its analytic time derivative.
struct BoundaryProvider {
  WallVelocityFn velocity;
  WallVelocityFn rate;

  bool empty() const { return !velocity; }
  static PressureBc pressure_bc(const StructuredMesh2D& mesh, int axis) {
    return mesh.periodic(axis) ? PressureBc::Periodic : PressureBc::ZeroGradient;
  }
};

// Values at the faces of the wall-adjacent cells, one entry per boundary face.
struct WallValues {
  std::vector<std::array<double, 2>> velocity;
};

// Ghost value beyond a wall face: wall*w + sum cells[k]*weight[k].
// `near` sits half a cell outside the wall, `far` one and a half.
struct GhostStencil {
  std::array<Index, 3> cells{-1, -1, -1};
  int count = 0;
  double near_wall = 0.0;
  std::array<double, 3> near{};
  double far_wall = 0.0;
  std::array<double, 3> far{};
};

// Lagrange weights of the polynomial through `nodes` evaluated at x.
std::vector<double> lagrange_weights(std::span<const double> nodes, double x);

struct ConvectionAssembly {
  SparseOperator N;
  CellVectorField b_wall;        // prescribed wall-velocity contributions
  CellVectorField b_correction;  // deferred FROMM - upwind correction
  ConvectionScheme scheme = ConvectionScheme::Central;

  CellVectorField b_N() const { return lincomb(1.0, b_wall, 1.0, b_correction); }
};

struct ContinuitySource {
  CellScalarField r;
  CellScalarField r_rate;
};

class DiscreteOperators {
public:
  DiscreteOperators(StructuredMesh2D mesh, double nu, ConvectionScheme convection,
                    BoundaryProvider bc = {});

  const StructuredMesh2D& mesh() const { return mesh_; }
  double viscosity() const { return nu_; }
  ConvectionScheme convection_scheme() const { return convection_; }
  const BoundaryProvider& boundary() const { return bc_; }

  const SparseOperator& K() const { return K_; }
  const SparseOperator& G() const { return G_; }
  const SparseOperator& D() const { return D_; }
  const SparseOperator& Gbar() const { return Gbar_; }
  const SparseOperator& L2() const { return L2_; }
  const SparseOperator& L3() const { return L3_; }
  const SparseOperator& L4() const { return L4_; }

  std::span<const GhostStencil> ghosts() const { return ghosts_; }

  WallValues wall_values(double t) const;
  WallValues wall_rates(double t) const;

  // b_K(t)
  CellVectorField diffusion_source(double t) const;
  CellVectorField diffusion_source(const WallValues& wall) const;

  // N(ū) with the given wall data; the FROMM correction is evaluated with `u`.
  ConvectionAssembly assemble_convection(const FaceVectorField& ubar, double t,
                                         const CellVectorField& u) const;
  ConvectionAssembly assemble_convection(const FaceVectorField& ubar, const WallValues& wall,
                                         const CellVectorField& u) const;
  // recompute b_correction for new cell values, same ū and wall data
  void update_correction(ConvectionAssembly& conv, const FaceVectorField& ubar,
                         const WallValues& wall, const CellVectorField& u) const;

  ContinuitySource continuity_source(double t) const;
  CellScalarField continuity_value(double t) const;
  CellScalarField continuity_rate(double t) const;

  // F(t,u,ū,p) = {K+N(ū)}u + b - Gp
  CellVectorField momentum_rhs(double t, const CellVectorField& u, const FaceVectorField& ubar,
                               const CellScalarField& p) const;

  // storage slots into K's pattern (shared by N and the momentum matrix)
  Index diagonal_slot(Index c) const { return diag_slots_[static_cast<std::size_t>(c)]; }

private:
  void add_face_convection(ConvectionAssembly& conv, const FaceVectorField& ubar,
                           const WallValues& wall) const;
  double ghost_value(Index bface, std::span<const double> u, double wall, bool far) const;

  StructuredMesh2D mesh_;
  double nu_;
  ConvectionScheme convection_;
  BoundaryProvider bc_;
  SparseOperator K_, G_, D_, Gbar_, L2_, L3_, L4_;
  std::vector<GhostStencil> ghosts_;
  std::vector<Index> diag_slots_;
  std::vector<std::array<Index, 4>> face_slots_;  // (o,o) (o,n) (n,o) (n,n)
  std::vector<std::array<Index, 4>> wall_slots_;  // (P,P) then (P, stencil cells)
};

// Standalone assemblers; DiscreteOperators caches their results.
SparseOperator assemble_diffusion(const StructuredMesh2D& mesh, double nu,
                                  std::span<const GhostStencil> ghosts);
SparseOperator assemble_gradient_cell(const StructuredMesh2D& mesh);
SparseOperator assemble_divergence(const StructuredMesh2D& mesh);
SparseOperator assemble_gradient_face(const StructuredMesh2D& mesh, const SparseOperator& G);
std::vector<GhostStencil> build_ghost_stencils(const StructuredMesh2D& mesh);

// Face interpolation of order 2, 3 (QUICK) or 4. For order 3 the upstream
// side follows the sign of the normal component of `flux_sign_source` when
// given and is the -axis side otherwise. Rows fall back to order 2 where the
// stencil is truncated by a wall.
SparseOperator interp_matrix(const StructuredMesh2D& mesh, int order,
                             const FaceVectorField* flux_sign_source = nullptr);
enum class Upstream : unsigned char { NegativeSide, PositiveSide };
// Upstream side per face from the sign of the normal flux (-axis side when null or non-negative).
std::vector<Upstream> quick_orientation(const StructuredMesh2D& mesh, const FaceVectorField* flux);
SparseOperator quick_matrix(const StructuredMesh2D& mesh, std::span<const Upstream> upstream);

// Matrix-free -D{diag(c)}Ḡ for a face coefficient field; symmetric, annihilates constants.
void face_laplacian_apply(const StructuredMesh2D& mesh, std::span<const double> coef,
                          std::span<const double> p, std::span<double> out);
SparseOperator assemble_face_laplacian(const StructuredMesh2D& mesh, std::span<const double> coef);

}  // namespace fvdae
