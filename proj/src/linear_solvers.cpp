#include "fvdae/linear_solvers.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <vector>

#include "fvdae/fields.hpp"

namespace fvdae {

namespace {

inline std::size_t at(Index k) { return static_cast<std::size_t>(k); }

// FFTW planning is not thread-safe
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

GaussSeidelReport gauss_seidel(const SparseOperator& M, std::span<const double> rhs, std::span<double> x,
                               const GaussSeidelControl& control) {
  const Index n = M.rows();
  if (M.cols() != n || static_cast<Index>(rhs.size()) != n || static_cast<Index>(x.size()) != n)
    throw std::invalid_argument("gauss_seidel: shape mismatch");
  const auto off = M.row_offsets();
  const auto cols = M.columns();
  const auto vals = M.values();
  std::vector<Index> diag(at(n));
  for (Index r = 0; r < n; ++r) {
    diag[at(r)] = M.find(r, r);
    if (diag[at(r)] < 0 || vals[at(diag[at(r)])] == 0.0)
      throw SolverError("gauss_seidel: zero diagonal in row " + std::to_string(r));
  }
  const double bnorm = vec::norm2(rhs);
  GaussSeidelReport rep;
  if (bnorm == 0.0 && !control.fixed_sweeps) {
    std::fill(x.begin(), x.end(), 0.0);
    return rep;
  }
  // Row r of sweep k sees U_r(x^{k-1}) = sum_{j>r} M_rj x_j; the residual of sweep k-1
  // is U_r(x^{k-2}) - U_r(x^{k-1}), so convergence is detected one sweep late at no extra cost.
  std::vector<double> upper_prev(at(n)), res(at(n));
  bool converged = false;
  for (int sweep = 1; sweep <= control.max_sweeps; ++sweep) {
    double rsum = 0.0;
    for (Index r = 0; r < n; ++r) {
      double lower = 0.0, upper = 0.0;
      for (Index q = off[at(r)]; q < off[at(r + 1)]; ++q) {
        const Index c = cols[at(q)];
        if (c < r)
          lower += vals[at(q)] * x[at(c)];
        else if (c > r)
          upper += vals[at(q)] * x[at(c)];
      }
      if (sweep > 1) {
        const double d = upper_prev[at(r)] - upper;
        rsum += d * d;
      }
      upper_prev[at(r)] = upper;
      x[at(r)] = (rhs[at(r)] - lower - upper) / vals[at(diag[at(r)])];
    }
    rep.sweeps = sweep;
    if (control.fixed_sweeps || sweep == 1) continue;
    rep.rel_residual = bnorm > 0.0 ? std::sqrt(rsum) / bnorm : std::sqrt(rsum);
    if (!std::isfinite(rep.rel_residual)) throw SolverError("gauss_seidel: non-finite residual");
    if (rep.rel_residual <= control.rel_tol) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    M.multiply(x, res);
    for (Index r = 0; r < n; ++r) res[at(r)] = rhs[at(r)] - res[at(r)];
    rep.rel_residual = bnorm > 0.0 ? vec::norm2(res) / bnorm : vec::norm2(res);
    if (!std::isfinite(rep.rel_residual)) throw SolverError("gauss_seidel: non-finite residual");
  }
  return rep;
}

CgReport conjugate_gradient_singular(const LinearMap& apply, std::span<const double> rhs,
                                     std::span<double> x, const CgControl& control,
                                     const LinearMap* preconditioner) {
  const std::size_t n = rhs.size();
  if (x.size() != n) throw std::invalid_argument("conjugate_gradient: shape mismatch");
  std::vector<double> b(rhs.begin(), rhs.end());
  vec::remove_mean(b);
  CgReport rep;
  rep.rhs_norm = vec::norm2(b);
  if (rep.rhs_norm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    return rep;
  }
  vec::remove_mean(x);
  std::vector<double> r(n), z(n), p(n), q(n);
  apply(x, q);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
  vec::remove_mean(r);
  auto precondition = [&](std::span<const double> in, std::span<double> out) {
    if (preconditioner) {
      (*preconditioner)(in, out);
      vec::remove_mean(out);
    } else {
      std::copy(in.begin(), in.end(), out.begin());
    }
  };
  const double target = control.rel_tol * rep.rhs_norm;
  double rnorm = vec::norm2(r);
  if (rnorm > target) {
    precondition(r, z);
    p = z;
    double rz = vec::dot(r, z);
    for (int it = 1; it <= control.max_iters; ++it) {
      apply(p, q);
      const double pq = vec::dot(p, q);
      if (!(pq > 0.0)) throw SolverError("conjugate_gradient: operator not positive on the search direction");
      const double alpha = rz / pq;
      vec::axpy(alpha, p, x);
      vec::axpy(-alpha, q, r);
      rep.iterations = it;
      rnorm = vec::norm2(r);
      if (!std::isfinite(rnorm)) throw SolverError("conjugate_gradient: non-finite residual");
      if (rnorm <= target) break;
      precondition(r, z);
      const double rz_new = vec::dot(r, z);
      const double beta = rz_new / rz;
      rz = rz_new;
      for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
  }
  vec::remove_mean(x);
  apply(x, q);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
  rep.residual_norm = vec::norm2(r);
  if (rnorm > target)
    throw SolverError("conjugate_gradient: no convergence in " + std::to_string(control.max_iters) +
                      " iterations, relative residual " + std::to_string(rnorm / rep.rhs_norm));
  return rep;
}

double asymmetry(const SparseOperator& M) {
  double worst = 0.0;
  const auto off = M.row_offsets();
  for (Index r = 0; r < M.rows(); ++r)
    for (Index q = off[at(r)]; q < off[at(r + 1)]; ++q) {
      const Index c = M.columns()[at(q)];
      worst = std::max(worst, std::abs(M.values()[at(q)] - M.at(c, r)));
    }
  return worst;
}

CgReport conjugate_gradient_singular(const SparseOperator& M, std::span<const double> rhs,
                                     std::span<double> x, const CgControl& control) {
  double scale = vec::norm_inf(M.values());
  if (asymmetry(M) > 1e-12 * std::max(scale, 1.0))
    throw std::invalid_argument("conjugate_gradient: operator is not symmetric");
  LinearMap op = [&M](std::span<const double> in, std::span<double> out) { M.multiply(in, out); };
  return conjugate_gradient_singular(op, rhs, x, control);
}

struct SpectralPoissonPreconditioner::Impl {
  Index nx = 0, ny = 0;
  double* buffer = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  std::vector<double> inv_eigen;  // scaled by the transform normalisation
};

SpectralPoissonPreconditioner::SpectralPoissonPreconditioner(const StructuredMesh2D& mesh)
    : impl_(std::make_unique<Impl>()) {
  Impl& s = *impl_;
  s.nx = mesh.nx();
  s.ny = mesh.ny();
  const std::size_t n = at(s.nx * s.ny);
  s.buffer = static_cast<double*>(fftw_malloc(sizeof(double) * n));
  if (!s.buffer) throw std::bad_alloc();

  auto eigen = [&](int axis, Index k) {
    const double d = mesh.spacing(axis);
    const double len = static_cast<double>(mesh.cells_along(axis));
    const double theta = mesh.periodic(axis) ? 2.0 * std::numbers::pi * static_cast<double>(k) / len
                                             : std::numbers::pi * static_cast<double>(k) / len;
    return (2.0 - 2.0 * std::cos(theta)) / (d * d);
  };
  auto norm = [&](int axis) {
    const double len = static_cast<double>(mesh.cells_along(axis));
    return mesh.periodic(axis) ? len : 2.0 * len;
  };
  const double total_norm = norm(0) * norm(1);
  s.inv_eigen.assign(n, 0.0);
  for (Index j = 0; j < s.ny; ++j)
    for (Index i = 0; i < s.nx; ++i) {
      const double lam = eigen(0, i) + eigen(1, j);
      s.inv_eigen[at(j * s.nx + i)] = (i == 0 && j == 0) ? 0.0 : 1.0 / (lam * total_norm);
    }

  const fftw_r2r_kind fx = mesh.periodic(0) ? FFTW_R2HC : FFTW_REDFT10;
  const fftw_r2r_kind fy = mesh.periodic(1) ? FFTW_R2HC : FFTW_REDFT10;
  const fftw_r2r_kind bx = mesh.periodic(0) ? FFTW_HC2R : FFTW_REDFT01;
  const fftw_r2r_kind by = mesh.periodic(1) ? FFTW_HC2R : FFTW_REDFT01;
  std::lock_guard<std::mutex> lock(planner_mutex());
  s.forward = fftw_plan_r2r_2d(static_cast<int>(s.ny), static_cast<int>(s.nx), s.buffer, s.buffer, fy, fx,
                               FFTW_ESTIMATE);
  s.backward = fftw_plan_r2r_2d(static_cast<int>(s.ny), static_cast<int>(s.nx), s.buffer, s.buffer, by, bx,
                                FFTW_ESTIMATE);
  if (!s.forward || !s.backward) throw std::runtime_error("FFTW planning failed");
}

SpectralPoissonPreconditioner::~SpectralPoissonPreconditioner() {
  if (!impl_) return;
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (impl_->forward) fftw_destroy_plan(impl_->forward);
  if (impl_->backward) fftw_destroy_plan(impl_->backward);
  fftw_free(impl_->buffer);
}

void SpectralPoissonPreconditioner::apply(double coef, std::span<const double> in, std::span<double> out) const {
  const Impl& s = *impl_;
  const std::size_t n = s.inv_eigen.size();
  if (in.size() != n || out.size() != n) throw std::invalid_argument("preconditioner: shape mismatch");
  std::copy(in.begin(), in.end(), s.buffer);
  fftw_execute(s.forward);
  const double scale = 1.0 / coef;
  for (std::size_t k = 0; k < n; ++k) s.buffer[k] *= s.inv_eigen[k] * scale;
  fftw_execute(s.backward);
  std::copy(s.buffer, s.buffer + n, out.begin());
}

}  // namespace fvdae
