#pragma once

#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>

#include "fvdae/mesh.hpp"
#include "fvdae/sparse.hpp"

namespace fvdae {

class SolverError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct GaussSeidelControl {
  double rel_tol = 1e-12;  // relative to ‖rhs‖₂
  int max_sweeps = 200;
  bool fixed_sweeps = false;  // run exactly max_sweeps
};

struct GaussSeidelReport {
  int sweeps = 0;
  double rel_residual = 0.0;
};

// Forward sweeps in natural row order. On convergence the reported residual is that of the
// previous sweep, which the final sweep only improves.
GaussSeidelReport gauss_seidel(const SparseOperator& M, std::span<const double> rhs, std::span<double> x,
                               const GaussSeidelControl& control = {});

struct CgControl {
  double rel_tol = 1e-13;
  int max_iters = 5000;
};

struct CgReport {
  int iterations = 0;
  double rhs_norm = 0.0;      // ‖projected rhs‖₂
  double residual_norm = 0.0; // ‖projected rhs - A x‖₂, recomputed at exit
  double rel_residual() const { return rhs_norm > 0.0 ? residual_norm / rhs_norm : 0.0; }
};

using LinearMap = std::function<void(std::span<const double>, std::span<double>)>;

// CG for a symmetric positive semi-definite operator whose nullspace is the
// constants. The rhs is projected to zero mean and the result de-meaned.
// `x` holds the initial guess on entry.
CgReport conjugate_gradient_singular(const LinearMap& apply, std::span<const double> rhs,
                                     std::span<double> x, const CgControl& control = {},
                                     const LinearMap* preconditioner = nullptr);
CgReport conjugate_gradient_singular(const SparseOperator& M, std::span<const double> rhs,
                                     std::span<double> x, const CgControl& control = {});

// largest |M - M^T| entry
double asymmetry(const SparseOperator& M);

// Inverse of the constant-coefficient compact Laplacian on the mesh (periodic or
// zero-gradient per axis), used as a CG preconditioner. The constant mode maps to zero.
class SpectralPoissonPreconditioner {
public:
  explicit SpectralPoissonPreconditioner(const StructuredMesh2D& mesh);
  ~SpectralPoissonPreconditioner();
  SpectralPoissonPreconditioner(const SpectralPoissonPreconditioner&) = delete;
  SpectralPoissonPreconditioner& operator=(const SpectralPoissonPreconditioner&) = delete;

  // out = (coef * L)^+ in, with L = -D Ḡ
  void apply(double coef, std::span<const double> in, std::span<double> out) const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace fvdae
