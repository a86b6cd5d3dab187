#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <sstream>

#include "fvdae/sparse.hpp"
#include "fvdae/spatial.hpp"
#include "fvdae/taylor_green.hpp"

using namespace fvdae;

namespace {

std::vector<double> random_vector(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = d(rng);
  return v;
}

// row-major dense product as the reference
std::vector<double> dense_multiply(const SparseOperator& M, const std::vector<double>& x) {
  const std::vector<double> dense = M.to_dense();
  std::vector<double> y(static_cast<std::size_t>(M.rows()), 0.0);
  for (Index r = 0; r < M.rows(); ++r)
    for (Index c = 0; c < M.cols(); ++c)
      y[static_cast<std::size_t>(r)] += dense[static_cast<std::size_t>(r * M.cols() + c)] * x[static_cast<std::size_t>(c)];
  return y;
}

}  // namespace

TEST_CASE("hadamard family") {
  CellScalarField a(2), b(2), one(2, 1.0);
  a[0] = 2.0;
  a[1] = 4.0;
  b[0] = 3.0;
  b[1] = 0.5;
  const CellScalarField ab = hadamard(a, b);
  CHECK(ab[0] == 6.0);
  CHECK(ab[1] == 2.0);
  CHECK(hadamard(a, one) == a);
  const CellScalarField unit = hadamard(a, hadamard_inverse(a));
  CHECK(unit[0] == doctest::Approx(1.0));
  CHECK(unit[1] == doctest::Approx(1.0));
  CellScalarField z(1);
  CHECK_THROWS_AS(hadamard_inverse(z), std::domain_error);
}

TEST_CASE("linear combinations") {
  CellVectorField a(3), b(3);
  for (Index k = 0; k < 9; ++k) {
    a[k] = static_cast<double>(k);
    b[k] = -2.0 * static_cast<double>(k) + 1.0;
  }
  CHECK(lincomb(1.0, a, 0.0, b) == a);
  const CellVectorField c = lincomb(2.0, a, 1.0, b);
  for (Index k = 0; k < 9; ++k) CHECK(c[k] == doctest::Approx(1.0));
  const auto v = random_vector(17, 3);
  const SparseOperator D = SparseOperator::diagonal(v);
  CHECK(D.diagonal() == v);
}

TEST_CASE("component-major layout") {
  CellVectorField f(4);
  f.component(1)[2] = 5.0;
  CHECK(f[4 + 2] == 5.0);
  CHECK(f.size() == 12);
}

TEST_CASE("sparse products match dense references on assembled operators") {
  for (CaseId id : {CaseId::I, CaseId::IV}) {
    const CaseSetup setup = make_case(case_spec(id), 8, GfisdmVariant::Z);
    const DiscreteOperators& ops = *setup.ops;
    for (const SparseOperator* M : {&ops.K(), &ops.G(), &ops.D(), &ops.Gbar(), &ops.L2(), &ops.L4()}) {
      const auto x = random_vector(static_cast<std::size_t>(M->cols()), 11);
      const auto ref = dense_multiply(*M, x);
      const auto got = *M * std::span<const double>(x);
      for (std::size_t k = 0; k < ref.size(); ++k) CHECK(got[k] == doctest::Approx(ref[k]).epsilon(1e-13));
    }
  }
}

TEST_CASE("block-diagonal application acts per component") {
  const CaseSetup setup = make_case(case_spec(CaseId::III), 8, GfisdmVariant::Z);
  const SparseOperator& L = setup.ops->L2();
  CellVectorField u(L.cols());
  const auto r = random_vector(u.size(), 5);
  std::copy(r.begin(), r.end(), u.values().begin());
  const FaceVectorField uf = block_diag_apply<Location::Face>(L, u);
  for (int k = 0; k < kComponents; ++k) {
    const std::vector<double> comp(u.component(k).begin(), u.component(k).end());
    const auto ref = dense_multiply(L, comp);
    for (std::size_t i = 0; i < ref.size(); ++i) CHECK(uf.component(k)[i] == doctest::Approx(ref[i]));
  }
  // identity and constant reproduction
  CHECK(block_diag_apply<Location::Cell>(SparseOperator::identity(L.cols()), u) == u);
  CellVectorField c(L.cols(), 2.5);
  const FaceVectorField cf = block_diag_apply<Location::Face>(L, c);
  for (double v : cf.values()) CHECK(v == doctest::Approx(2.5));
  CHECK_THROWS(block_diag_apply<Location::Face>(L, FaceVectorField(3)));
}

TEST_CASE("csv output") {
  const auto mesh = build_uniform_mesh(2, 2, Rectangle{0.0, 2.0, 0.0, 4.0},
                                       {BoundaryKind::Periodic, BoundaryKind::Periodic});
  CellScalarField s(4);
  s[0] = 0.1;
  s[3] = -3.0;
  std::ostringstream out;
  write_csv(out, mesh, s);
  CHECK(out.str() == "i,x,y,value\n0,0.5,1,0.10000000000000001\n1,1.5,1,0\n2,0.5,3,0\n3,1.5,3,-3\n");
  CellVectorField v(4);
  v[1] = 2.0;
  v[4 + 1] = -1.0;
  std::ostringstream vout;
  write_csv(vout, mesh, v);
  CHECK(vout.str() == "i,x,y,vx,vy\n0,0.5,1,0,0\n1,1.5,1,2,-1\n2,0.5,3,0,0\n3,1.5,3,0,0\n");
}
