#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <numeric>
#include <random>

#include "fvdae/linear_solvers.hpp"
#include "fvdae/spatial.hpp"
#include "fvdae/taylor_green.hpp"

using namespace fvdae;

namespace {

Eigen::MatrixXd to_eigen(const SparseOperator& M) {
  const auto d = M.to_dense();
  Eigen::MatrixXd out(M.rows(), M.cols());
  for (Index r = 0; r < M.rows(); ++r)
    for (Index c = 0; c < M.cols(); ++c) out(r, c) = d[static_cast<std::size_t>(r * M.cols() + c)];
  return out;
}

// Moore-Penrose solve through the symmetric eigendecomposition
Eigen::VectorXd pseudo_inverse_solve(const Eigen::MatrixXd& S, const Eigen::VectorXd& b) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(S);
  const double cutoff = 1e-10 * eig.eigenvalues().cwiseAbs().maxCoeff();
  Eigen::VectorXd coeff = eig.eigenvectors().transpose() * b;
  for (Index k = 0; k < coeff.size(); ++k)
    coeff(k) = std::abs(eig.eigenvalues()(k)) > cutoff ? coeff(k) / eig.eigenvalues()(k) : 0.0;
  return eig.eigenvectors() * coeff;
}

double residual_norm(const SparseOperator& M, std::span<const double> x, std::span<const double> b) {
  const auto Mx = M * x;
  double s = 0.0;
  for (std::size_t k = 0; k < b.size(); ++k) s += (b[k] - Mx[k]) * (b[k] - Mx[k]);
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("Gauss-Seidel") {
  SUBCASE("identity in one sweep") {
    const std::vector<double> b{1.0, -2.0, 3.5};
    std::vector<double> x(3, 7.0);
    const GaussSeidelReport r = gauss_seidel(SparseOperator::identity(3), b, x);
    CHECK(x == b);
    CHECK(r.sweeps <= 2);
  }
  SUBCASE("2x2 diagonally dominant system") {
    // [4 1; 2 5] x = [1; 2]  ->  x = (1/6, 1/3)
    const SparseOperator M(2, 2, {{0, 0, 4.0}, {0, 1, 1.0}, {1, 0, 2.0}, {1, 1, 5.0}});
    const std::vector<double> b{1.0, 2.0};
    std::vector<double> x(2, 0.0);
    const GaussSeidelReport r = gauss_seidel(M, b, x);
    CHECK(x[0] == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
    CHECK(x[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(r.rel_residual <= 1e-12);
  }
  SUBCASE("zero diagonal is rejected") {
    const SparseOperator M(2, 2, {{0, 1, 1.0}, {1, 0, 1.0}});
    std::vector<double> x(2);
    CHECK_THROWS_AS(gauss_seidel(M, std::vector<double>{1.0, 1.0}, x), SolverError);
  }
  SUBCASE("momentum matrix: dominance and monotone residual") {
    const CaseSpec spec = case_spec(CaseId::IV);
    const CaseSetup s = make_case(spec, 16, GfisdmVariant::Z);
    const StructuredMesh2D& mesh = s.ops->mesh();
    const ConvectionAssembly conv = s.ops->assemble_convection(sample_face_velocity(mesh, 0.0, spec.nu), 0.0,
                                                               sample_cell_velocity(mesh, 0.0, spec.nu));
    for (double g : {0.01, 0.5}) {
      const SparseOperator M = add(s.ops->K(), conv.N).shifted_identity(-g);
      const auto off = M.row_offsets();
      for (Index r = 0; r < M.rows(); ++r) {
        double offsum = 0.0;
        for (Index q = off[static_cast<std::size_t>(r)]; q < off[static_cast<std::size_t>(r + 1)]; ++q)
          if (M.columns()[static_cast<std::size_t>(q)] != r) offsum += std::abs(M.values()[static_cast<std::size_t>(q)]);
        CHECK(M.at(r, r) > offsum);
      }
      std::vector<double> b(static_cast<std::size_t>(M.rows()));
      for (std::size_t k = 0; k < b.size(); ++k) b[k] = std::sin(0.3 * static_cast<double>(k));
      std::vector<double> x(b.size(), 0.0);
      double last = residual_norm(M, x, b);
      for (int sweep = 0; sweep < 10; ++sweep) {
        gauss_seidel(M, b, x, GaussSeidelControl{0.0, 1, true});
        const double now = residual_norm(M, x, b);
        CHECK(now < last);
        last = now;
      }
      std::vector<double> y(b.size(), 0.0);
      const GaussSeidelReport rep = gauss_seidel(M, b, y);
      CHECK(rep.rel_residual <= 1e-12);
      const double bn = std::sqrt(std::inner_product(b.begin(), b.end(), b.begin(), 0.0));
      CHECK(residual_norm(M, y, b) / bn <= 1e-12);
    }
  }
}

TEST_CASE("singular conjugate gradients") {
  const auto mesh = build_uniform_mesh(4, 4, Rectangle{0.0, 1.0, 0.0, 1.0},
                                       {BoundaryKind::Periodic, BoundaryKind::Periodic});
  const DiscreteOperators ops(mesh, 1.0, ConvectionScheme::Central);
  const FaceScalarField ones(mesh.face_count(), 1.0);
  const SparseOperator S = assemble_face_laplacian(mesh, ones.values());
  CHECK(asymmetry(S) <= 1e-12);

  SUBCASE("zero right-hand side") {
    std::vector<double> x(16, 1.0);
    conjugate_gradient_singular(S, std::vector<double>(16, 0.0), x);
    for (double v : x) CHECK(v == 0.0);
  }
  SUBCASE("de-meaned delta against the dense pseudo-inverse") {
    std::vector<double> b(16, -1.0 / 16.0);
    b[5] += 1.0;
    std::vector<double> x(16, 0.0);
    const CgReport rep = conjugate_gradient_singular(S, b, x, CgControl{1e-13, 1000});
    CHECK(rep.rel_residual() <= 1e-12);
    const Eigen::VectorXd ref = pseudo_inverse_solve(to_eigen(S), Eigen::Map<const Eigen::VectorXd>(b.data(), 16));
    for (Index k = 0; k < 16; ++k) CHECK(x[static_cast<std::size_t>(k)] == doctest::Approx(ref(k)).scale(1.0).epsilon(1e-10));
  }
  SUBCASE("matrix-free operator with the spectral preconditioner") {
    for (BoundaryKind kind : {BoundaryKind::Periodic, BoundaryKind::Dirichlet}) {
      const auto m8 = build_uniform_mesh(8, 8, Rectangle{0.0, 2.0, 0.0, 1.0}, {kind, kind});
      std::mt19937_64 rng(3);
      std::uniform_real_distribution<double> d(0.5, 2.0);
      FaceScalarField coef(m8.face_count());
      for (double& c : coef.values()) c = d(rng);
      const SparseOperator A = assemble_face_laplacian(m8, coef.values());
      std::vector<double> b(64);
      for (double& v : b) v = d(rng);
      const std::span<const double> cs = coef.values();
      LinearMap apply = [&](std::span<const double> in, std::span<double> out) { face_laplacian_apply(m8, cs, in, out); };
      SpectralPoissonPreconditioner pc(m8);
      LinearMap pre = [&](std::span<const double> in, std::span<double> out) { pc.apply(1.0, in, out); };
      std::vector<double> x(64, 0.0), y(64, 0.0);
      const CgReport with = conjugate_gradient_singular(apply, b, x, CgControl{1e-12, 1000}, &pre);
      const CgReport without = conjugate_gradient_singular(A, b, y, CgControl{1e-12, 1000});
      CHECK(with.iterations <= without.iterations);
      const Eigen::VectorXd ref = pseudo_inverse_solve(to_eigen(A), Eigen::Map<const Eigen::VectorXd>(b.data(), 64));
      for (Index k = 0; k < 64; ++k) {
        CHECK(x[static_cast<std::size_t>(k)] == doctest::Approx(ref(k)).scale(1.0).epsilon(1e-9));
        CHECK(y[static_cast<std::size_t>(k)] == doctest::Approx(ref(k)).scale(1.0).epsilon(1e-9));
      }
    }
  }
  SUBCASE("spectral preconditioner inverts the constant-coefficient operator") {
    SpectralPoissonPreconditioner pc(mesh);
    std::vector<double> x(16);
    for (std::size_t k = 0; k < 16; ++k) x[k] = std::cos(static_cast<double>(k));
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / 16.0;
    for (double& v : x) v -= mean;
    const auto Sx = S * std::span<const double>(x);
    std::vector<double> back(16);
    pc.apply(2.0, Sx, back);
    for (std::size_t k = 0; k < 16; ++k) CHECK(2.0 * back[k] == doctest::Approx(x[k]).scale(1.0).epsilon(1e-12));
  }
}
