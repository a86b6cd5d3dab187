#pragma once

#include <span>
#include <vector>

#include "fvdae/fields.hpp"

namespace fvdae {

struct Triplet {
  Index row;
  Index col;
  double value;
};

// Row-compressed matrix with sorted, duplicate-free columns per row.
class SparseOperator {
public:
  SparseOperator() = default;
  SparseOperator(Index rows, Index cols, std::vector<Triplet> entries);

  static SparseOperator identity(Index n);
  static SparseOperator diagonal(std::span<const double> d);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index nonzeros() const { return static_cast<Index>(values_.size()); }

  std::span<const Index> row_offsets() const { return offsets_; }
  std::span<const Index> columns() const { return columns_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  // coefficient (row, col), zero if not stored
  double at(Index row, Index col) const;
  // storage slot of (row, col), -1 if not stored
  Index find(Index row, Index col) const;
  std::vector<double> diagonal() const;

  void multiply(std::span<const double> x, std::span<double> y) const;
  // y += a * M x
  void multiply_add(double a, std::span<const double> x, std::span<double> y) const;
  std::vector<double> operator*(std::span<const double> x) const;

  // I + a*this (square only), keeps the sparsity of this plus the diagonal
  SparseOperator shifted_identity(double a) const;
  SparseOperator scaled(double a) const;
  SparseOperator transpose() const;
  std::vector<double> to_dense() const;

private:
  Index rows_ = 0, cols_ = 0;
  std::vector<Index> offsets_{0};
  std::vector<Index> columns_;
  std::vector<double> values_;
};

SparseOperator add(const SparseOperator& a, const SparseOperator& b, double wa = 1.0, double wb = 1.0);
SparseOperator multiply(const SparseOperator& a, const SparseOperator& b);

// {M} applied to each of the three component blocks
void block_diag_apply(const SparseOperator& m, std::span<const double> in, std::span<double> out);

template <Location Out, Location In>
Field<Out, kComponents> block_diag_apply(const SparseOperator& m, const Field<In, kComponents>& in) {
  if (m.cols() != in.points()) throw std::invalid_argument("block_diag_apply: shape mismatch");
  Field<Out, kComponents> out(m.rows());
  block_diag_apply(m, in.values(), out.values());
  return out;
}

}  // namespace fvdae
