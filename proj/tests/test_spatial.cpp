#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "fvdae/spatial.hpp"
#include "fvdae/taylor_green.hpp"

using namespace fvdae;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

StructuredMesh2D square(Index n, BoundaryKind kind) {
  return build_uniform_mesh(n, n, Rectangle{0.0, kTwoPi, 0.0, kTwoPi}, {kind, kind});
}

BoundaryProvider constant_wall(double ux, double uy) {
  BoundaryProvider bc;
  bc.velocity = [=](Point, double) { return std::array<double, 2>{ux, uy}; };
  bc.rate = [](Point, double) { return std::array<double, 2>{0.0, 0.0}; };
  return bc;
}

std::vector<double> random_vector(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = d(rng);
  return v;
}

}  // namespace

TEST_CASE("lagrange weights") {
  const std::vector<double> nodes{0.0, 1.0, 2.0, 3.0};
  const auto w = lagrange_weights(nodes, 1.5);
  CHECK(w[0] == doctest::Approx(-1.0 / 16.0));
  CHECK(w[1] == doctest::Approx(9.0 / 16.0));
  CHECK(w[2] == doctest::Approx(9.0 / 16.0));
  CHECK(w[3] == doctest::Approx(-1.0 / 16.0));
}

TEST_CASE("ghost stencils extrapolate cubics exactly") {
  const auto mesh = square(6, BoundaryKind::Dirichlet);
  const auto ghosts = build_ghost_stencils(mesh);
  REQUIRE(static_cast<Index>(ghosts.size()) == mesh.boundary_face_count());
  const double h = mesh.dx();
  auto profile = [](double s) { return 1.0 + 2.0 * s - s * s + 0.5 * s * s * s; };
  for (std::size_t b = 0; b < ghosts.size(); ++b) {
    const GhostStencil& g = ghosts[b];
    REQUIRE(g.count == 3);
    const BoundaryFaceRecord& face = mesh.boundary_faces()[b];
    const double wall = face.axis == 0 ? face.centroid.x : face.centroid.y;
    double near = g.near_wall * profile(0.0), far = g.far_wall * profile(0.0);
    for (int k = 0; k < 3; ++k) {
      const Point c = mesh.cell_centroid(g.cells[static_cast<std::size_t>(k)]);
      const double s = std::abs((face.axis == 0 ? c.x : c.y) - wall) / h;
      CHECK(s == doctest::Approx(0.5 + k));
      near += g.near[static_cast<std::size_t>(k)] * profile(s);
      far += g.far[static_cast<std::size_t>(k)] * profile(s);
    }
    CHECK(near == doctest::Approx(profile(-0.5)).epsilon(1e-12));
    CHECK(far == doctest::Approx(profile(-1.5)).epsilon(1e-12));
  }
}

TEST_CASE("hand-assembled periodic diffusion") {
  const double nu = 0.7;
  const DiscreteOperators ops(square(4, BoundaryKind::Periodic), nu, ConvectionScheme::Central);
  const double d2 = ops.mesh().dx() * ops.mesh().dx();
  const SparseOperator& K = ops.K();
  for (Index c = 0; c < 16; ++c) {
    const auto [i, j] = ops.mesh().cell_ij(c);
    CHECK(K.at(c, c) == doctest::Approx(-4.0 * nu / d2));
    for (auto [di, dj] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
      const Index n = ops.mesh().cell_index((i + di + 4) % 4, (j + dj + 4) % 4);
      CHECK(K.at(c, n) == doctest::Approx(nu / d2));
    }
    double row = 0.0;
    for (Index n = 0; n < 16; ++n) row += K.at(c, n);
    CHECK(row == doctest::Approx(0.0).epsilon(1e-14));
  }
}

TEST_CASE("wall diffusion annihilates constants with matching wall data") {
  const DiscreteOperators ops(square(8, BoundaryKind::Dirichlet), 0.3, ConvectionScheme::Central,
                              constant_wall(1.5, -2.0));
  const Index m = ops.mesh().cell_count();
  CellVectorField u(m);
  for (Index c = 0; c < m; ++c) {
    u[c] = 1.5;
    u[m + c] = -2.0;
  }
  CellVectorField Ku = block_diag_apply<Location::Cell>(ops.K(), u);
  const CellVectorField bK = ops.diffusion_source(0.0);
  for (std::size_t k = 0; k < Ku.size(); ++k) CHECK(Ku.values()[k] + bK.values()[k] == doctest::Approx(0.0).scale(10.0));
  for (double d : ops.K().diagonal()) CHECK(d < 0.0);
}

TEST_CASE("gradients and divergence") {
  SUBCASE("constant pressure has no gradient") {
    for (BoundaryKind kind : {BoundaryKind::Periodic, BoundaryKind::Dirichlet}) {
      const DiscreteOperators ops(square(6, kind), 1.0, ConvectionScheme::Central,
                                  kind == BoundaryKind::Dirichlet ? constant_wall(0, 0) : BoundaryProvider{});
      const std::vector<double> p(36, 3.0);
      for (double g : ops.G() * std::span<const double>(p)) CHECK(g == doctest::Approx(0.0).scale(1.0));
      for (double g : ops.Gbar() * std::span<const double>(p)) CHECK(g == doctest::Approx(0.0).scale(1.0));
    }
  }
  SUBCASE("linear pressure away from walls") {
    const auto mesh = build_uniform_mesh(4, 4, Rectangle{0.0, 1.0, 0.0, 1.0},
                                         {BoundaryKind::Dirichlet, BoundaryKind::Periodic});
    const DiscreteOperators ops(mesh, 1.0, ConvectionScheme::Central, constant_wall(0, 0));
    std::vector<double> p(16);
    for (Index c = 0; c < 16; ++c) p[static_cast<std::size_t>(c)] = mesh.cell_centroid(c).x;
    const auto g = ops.G() * std::span<const double>(p);
    for (Index c = 0; c < 16; ++c) {
      CHECK(g[static_cast<std::size_t>(32 + c)] == 0.0);
      CHECK(g[static_cast<std::size_t>(16 + c)] == doctest::Approx(0.0).scale(1.0));
      if (!mesh.touches_wall(c, 0)) CHECK(g[static_cast<std::size_t>(c)] == doctest::Approx(1.0));
    }
  }
  SUBCASE("face Laplacian is the compact five-point stencil") {
    const auto mesh = square(4, BoundaryKind::Periodic);
    const DiscreteOperators ops(mesh, 1.0, ConvectionScheme::Central);
    const double d2 = mesh.dx() * mesh.dx();
    for (Index c = 0; c < 16; ++c) {
      std::vector<double> e(16, 0.0);
      e[static_cast<std::size_t>(c)] = 1.0;
      const auto gp = ops.Gbar() * std::span<const double>(e);
      const auto lap = ops.D() * std::span<const double>(gp);
      const auto [i, j] = mesh.cell_ij(c);
      double sum = 0.0;
      for (Index r = 0; r < 16; ++r) {
        const auto [ri, rj] = mesh.cell_ij(r);
        const Index di = std::min((ri - i + 4) % 4, (i - ri + 4) % 4);
        const Index dj = std::min((rj - j + 4) % 4, (j - rj + 4) % 4);
        const double expected = r == c ? -4.0 / d2 : (di + dj == 1 ? 1.0 / d2 : 0.0);
        CHECK(lap[static_cast<std::size_t>(r)] == doctest::Approx(expected).scale(1.0));
        sum += lap[static_cast<std::size_t>(r)];
      }
      CHECK(sum == doctest::Approx(0.0).scale(1.0));
    }
  }
}

TEST_CASE("continuity sources") {
  SUBCASE("periodic sources vanish") {
    const CaseSetup s = make_case(case_spec(CaseId::I), 8, GfisdmVariant::Z);
    const CellScalarField r = s.ops->continuity_value(0.2), rr = s.ops->continuity_rate(0.2);
    for (double v : r.values()) CHECK(v == 0.0);
    for (double v : rr.values()) CHECK(v == 0.0);
  }
  SUBCASE("wall rates follow the exponential decay") {
    const CaseSpec spec = case_spec(CaseId::III);
    const CaseSetup s = make_case(spec, 8, GfisdmVariant::Z);
    const CellScalarField r = s.ops->continuity_value(0.05);
    const CellScalarField rr = s.ops->continuity_rate(0.05);
    double total = 0.0;
    for (Index c = 0; c < r.points(); ++c) {
      CHECK(rr[c] == doctest::Approx(-2.0 * spec.nu * r[c]).scale(1e-12));
      total += r[c];
    }
    CHECK(total == doctest::Approx(0.0).scale(1.0));
  }
  SUBCASE("exactly sampled face velocities satisfy the constraint") {
    for (CaseId id : {CaseId::I, CaseId::II, CaseId::III, CaseId::IV})
      for (Index n : {8, 16}) {
        const CaseSpec spec = case_spec(id);
        const CaseSetup s = make_case(spec, n, GfisdmVariant::Z);
        const FaceVectorField ubar = sample_face_velocity(s.ops->mesh(), 0.03, spec.nu);
        const auto div = s.ops->D() * ubar.values();
        const CellScalarField r = s.ops->continuity_value(0.03);
        for (Index c = 0; c < r.points(); ++c) CHECK(std::abs(div[static_cast<std::size_t>(c)] - r[c]) <= 1e-13);
      }
  }
  SUBCASE("interior fluxes telescope") {
    const CaseSetup s = make_case(case_spec(CaseId::IV), 8, GfisdmVariant::Z);
    const auto ubar = random_vector(static_cast<std::size_t>(3 * s.ops->mesh().face_count()), 9);
    double total = 0.0;
    for (double v : s.ops->D() * std::span<const double>(ubar)) total += v;
    CHECK(total == doctest::Approx(0.0).scale(1.0));
  }
}

TEST_CASE("interpolation matrices") {
  for (BoundaryKind kind : {BoundaryKind::Periodic, BoundaryKind::Dirichlet}) {
    const auto mesh = square(8, kind);
    for (int order : {2, 3, 4}) {
      const SparseOperator L = interp_matrix(mesh, order);
      const auto off = L.row_offsets();
      for (Index f = 0; f < L.rows(); ++f) {
        double sum = 0.0;
        for (Index q = off[static_cast<std::size_t>(f)]; q < off[static_cast<std::size_t>(f + 1)]; ++q)
          sum += L.values()[static_cast<std::size_t>(q)];
        CHECK(sum == doctest::Approx(1.0));
      }
    }
  }
  const auto mesh = square(8, BoundaryKind::Periodic);
  const SparseOperator L2 = interp_matrix(mesh, 2);
  const SparseOperator L4 = interp_matrix(mesh, 4);
  for (Index f = 0; f < mesh.face_count(); ++f) {
    const FaceRecord& face = mesh.face(f);
    CHECK(L2.at(f, face.owner) == 0.5);
    CHECK(L2.at(f, face.neighbor) == 0.5);
    const LineStencil st = face_line_stencil(mesh, f, 4);
    CHECK(L4.at(f, st.cells[0]) == doctest::Approx(-1.0 / 16.0));
    CHECK(L4.at(f, st.cells[1]) == doctest::Approx(9.0 / 16.0));
    CHECK(L4.at(f, st.cells[2]) == doctest::Approx(9.0 / 16.0));
    CHECK(L4.at(f, st.cells[3]) == doctest::Approx(-1.0 / 16.0));
  }
  // polynomial reproduction on faces whose stencils do not cross the seam
  std::vector<double> lin(64);
  for (Index c = 0; c < 64; ++c) lin[static_cast<std::size_t>(c)] = 2.0 * mesh.cell_centroid(c).x - 1.0;
  for (int order : {2, 3, 4}) {
    const auto vals = interp_matrix(mesh, order) * std::span<const double>(lin);
    for (Index f = 0; f < mesh.x_face_count(); ++f) {
      const LineStencil st = face_line_stencil(mesh, f, 4);
      bool seam = false;
      for (std::size_t k = 1; k < st.cells.size(); ++k)
        seam = seam || mesh.cell_ij(st.cells[k])[0] < mesh.cell_ij(st.cells[k - 1])[0];
      if (seam) continue;
      CHECK(vals[static_cast<std::size_t>(f)] == doctest::Approx(2.0 * mesh.face(f).centroid.x - 1.0));
    }
  }
}

TEST_CASE("convection") {
  const auto mesh = square(8, BoundaryKind::Periodic);
  const Index m = mesh.cell_count(), mf = mesh.face_count();
  SUBCASE("zero face velocity gives no convection") {
    const DiscreteOperators ops(mesh, 1.0, ConvectionScheme::FrommDeferredCorrection);
    const CellVectorField u = sample_cell_velocity(mesh, 0.0, 1.0);
    const ConvectionAssembly conv = ops.assemble_convection(FaceVectorField(mf), 0.0, u);
    for (double v : conv.N.values()) CHECK(v == 0.0);
    const CellVectorField bN = conv.b_N();
    for (double v : bN.values()) CHECK(v == 0.0);
  }
  SUBCASE("uniform transport of a constant vanishes") {
    const DiscreteOperators ops(mesh, 1.0, ConvectionScheme::Central);
    FaceVectorField ubar(mf);
    for (Index f = 0; f < mf; ++f) ubar[f] = 0.8;
    const ConvectionAssembly conv = ops.assemble_convection(ubar, 0.0, CellVectorField(m));
    const std::vector<double> ones(static_cast<std::size_t>(m), 1.0);
    for (double v : conv.N * std::span<const double>(ones)) CHECK(v == doctest::Approx(0.0).scale(1.0));
  }
  SUBCASE("FROMM face value from upstream, centre and downstream cells") {
    const DiscreteOperators ops(mesh, 1.0, ConvectionScheme::FrommDeferredCorrection);
    FaceVectorField ubar(mf);
    for (Index f = 0; f < mesh.x_face_count(); ++f) ubar[f] = 1.0;
    CellVectorField u(m);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (double& v : u.values()) v = d(rng);
    for (Index c = 2 * m; c < 3 * m; ++c) u[c] = 0.0;
    const ConvectionAssembly conv = ops.assemble_convection(ubar, 0.0, u);
    const CellVectorField bN = conv.b_N();
    auto phi = [&](Index i, Index j, int k) { return u[k * m + mesh.cell_index((i + 8) % 8, j)]; };
    // flux through the face between (i, j) and (i + 1, j) with the flow in +x
    auto face_value = [&](Index i, Index j, int k) { return phi(i, j, k) + 0.25 * (phi(i + 1, j, k) - phi(i - 1, j, k)); };
    for (int k = 0; k < 2; ++k) {
      const auto Nu = conv.N * u.component(k);
      for (Index c = 0; c < m; ++c) {
        const auto [i, j] = mesh.cell_ij(c);
        const double expected = -(face_value(i, j, k) - face_value(i - 1, j, k)) / mesh.dx();
        CHECK(Nu[static_cast<std::size_t>(c)] + bN[k * m + c] == doctest::Approx(expected).epsilon(1e-12));
      }
    }
    for (double v : conv.N.diagonal()) CHECK(v <= 0.0);
  }
  SUBCASE("upwind diagonal is non-positive for the vortex") {
    const CaseSpec spec = case_spec(CaseId::IV);
    const CaseSetup s = make_case(spec, 16, GfisdmVariant::Z);
    const FaceVectorField ubar = sample_face_velocity(s.ops->mesh(), 0.0, spec.nu);
    const ConvectionAssembly conv =
        s.ops->assemble_convection(ubar, 0.0, sample_cell_velocity(s.ops->mesh(), 0.0, spec.nu));
    for (double v : conv.N.diagonal()) CHECK(v <= 0.0);
  }
}

TEST_CASE("momentum right-hand side converges at second order") {
  const CaseSpec spec = case_spec(CaseId::I);
  std::vector<double> err;
  for (Index n : {32, 64}) {
    const CaseSetup s = make_case(spec, n, GfisdmVariant::Z);
    const StructuredMesh2D& mesh = s.ops->mesh();
    const CellVectorField F = s.ops->momentum_rhs(0.0, sample_cell_velocity(mesh, 0.0, spec.nu),
                                                  sample_face_velocity(mesh, 0.0, spec.nu),
                                                  sample_pressure(mesh, 0.0, spec.nu));
    err.push_back(error_norms(F, sample_cell_rate(mesh, 0.0, spec.nu)).linf);
  }
  CHECK(err[0] / err[1] == doctest::Approx(4.0).epsilon(0.1));

  const CaseSetup s = make_case(spec, 8, GfisdmVariant::Z);
  const Index m = s.ops->mesh().cell_count();
  const CellVectorField zero = s.ops->momentum_rhs(0.0, CellVectorField(m), FaceVectorField(s.ops->mesh().face_count()),
                                                   CellScalarField(m));
  for (double v : zero.values()) CHECK(v == 0.0);
}

TEST_CASE("operators are linear") {
  const CaseSetup s = make_case(case_spec(CaseId::IV), 8, GfisdmVariant::Z);
  const auto x = random_vector(64, 1), y = random_vector(64, 2);
  std::vector<double> combo(64);
  for (std::size_t k = 0; k < 64; ++k) combo[k] = 2.0 * x[k] - 3.0 * y[k];
  for (const SparseOperator* M : {&s.ops->K(), &s.ops->L4()}) {
    const auto a = *M * std::span<const double>(x), b = *M * std::span<const double>(y);
    const auto c = *M * std::span<const double>(combo);
    for (std::size_t k = 0; k < c.size(); ++k) CHECK(c[k] == doctest::Approx(2.0 * a[k] - 3.0 * b[k]).scale(1.0));
  }
}
