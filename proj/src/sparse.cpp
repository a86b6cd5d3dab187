#include "fvdae/sparse.hpp"

#include <algorithm>
#include <stdexcept>

namespace fvdae {

SparseOperator::SparseOperator(Index rows, Index cols, std::vector<Triplet> entries)
    : rows_(rows), cols_(cols) {
  for (const Triplet& t : entries)
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
      throw std::out_of_range("sparse entry outside the operator shape");
  std::stable_sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  offsets_.assign(static_cast<std::size_t>(rows + 1), 0);
  columns_.reserve(entries.size());
  values_.reserve(entries.size());
  std::size_t k = 0;
  for (Index r = 0; r < rows; ++r) {
    while (k < entries.size() && entries[k].row == r) {
      const Index c = entries[k].col;
      double v = 0.0;
      while (k < entries.size() && entries[k].row == r && entries[k].col == c) v += entries[k++].value;
      columns_.push_back(c);
      values_.push_back(v);
    }
    offsets_[static_cast<std::size_t>(r + 1)] = static_cast<Index>(columns_.size());
  }
}

SparseOperator SparseOperator::identity(Index n) {
  std::vector<double> ones(static_cast<std::size_t>(n), 1.0);
  return diagonal(ones);
}

SparseOperator SparseOperator::diagonal(std::span<const double> d) {
  std::vector<Triplet> t;
  t.reserve(d.size());
  for (std::size_t i = 0; i < d.size(); ++i)
    t.push_back({static_cast<Index>(i), static_cast<Index>(i), d[i]});
  const auto n = static_cast<Index>(d.size());
  return SparseOperator(n, n, std::move(t));
}

Index SparseOperator::find(Index row, Index col) const {
  const auto b = columns_.begin() + offsets_[static_cast<std::size_t>(row)];
  const auto e = columns_.begin() + offsets_[static_cast<std::size_t>(row + 1)];
  const auto it = std::lower_bound(b, e, col);
  if (it == e || *it != col) return -1;
  return static_cast<Index>(it - columns_.begin());
}

double SparseOperator::at(Index row, Index col) const {
  const Index k = find(row, col);
  return k < 0 ? 0.0 : values_[static_cast<std::size_t>(k)];
}

std::vector<double> SparseOperator::diagonal() const {
  std::vector<double> d(static_cast<std::size_t>(std::min(rows_, cols_)), 0.0);
  for (Index r = 0; r < static_cast<Index>(d.size()); ++r) d[static_cast<std::size_t>(r)] = at(r, r);
  return d;
}

void SparseOperator::multiply(std::span<const double> x, std::span<double> y) const {
  if (static_cast<Index>(x.size()) != cols_ || static_cast<Index>(y.size()) != rows_)
    throw std::invalid_argument("sparse multiply: shape mismatch");
  for (Index r = 0; r < rows_; ++r) {
    double s = 0.0;
    for (Index k = offsets_[static_cast<std::size_t>(r)]; k < offsets_[static_cast<std::size_t>(r + 1)]; ++k)
      s += values_[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(columns_[static_cast<std::size_t>(k)])];
    y[static_cast<std::size_t>(r)] = s;
  }
}

void SparseOperator::multiply_add(double a, std::span<const double> x, std::span<double> y) const {
  if (static_cast<Index>(x.size()) != cols_ || static_cast<Index>(y.size()) != rows_)
    throw std::invalid_argument("sparse multiply: shape mismatch");
  for (Index r = 0; r < rows_; ++r) {
    double s = 0.0;
    for (Index k = offsets_[static_cast<std::size_t>(r)]; k < offsets_[static_cast<std::size_t>(r + 1)]; ++k)
      s += values_[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(columns_[static_cast<std::size_t>(k)])];
    y[static_cast<std::size_t>(r)] += a * s;
  }
}

std::vector<double> SparseOperator::operator*(std::span<const double> x) const {
  std::vector<double> y(static_cast<std::size_t>(rows_));
  multiply(x, y);
  return y;
}

SparseOperator SparseOperator::shifted_identity(double a) const {
  if (rows_ != cols_) throw std::invalid_argument("shifted_identity needs a square operator");
  std::vector<Triplet> t;
  t.reserve(values_.size() + static_cast<std::size_t>(rows_));
  for (Index r = 0; r < rows_; ++r) {
    t.push_back({r, r, 1.0});
    for (Index k = offsets_[static_cast<std::size_t>(r)]; k < offsets_[static_cast<std::size_t>(r + 1)]; ++k)
      t.push_back({r, columns_[static_cast<std::size_t>(k)], a * values_[static_cast<std::size_t>(k)]});
  }
  return SparseOperator(rows_, cols_, std::move(t));
}

SparseOperator SparseOperator::scaled(double a) const {
  SparseOperator out = *this;
  for (double& v : out.values_) v *= a;
  return out;
}

SparseOperator SparseOperator::transpose() const {
  std::vector<Triplet> t;
  t.reserve(values_.size());
  for (Index r = 0; r < rows_; ++r)
    for (Index k = offsets_[static_cast<std::size_t>(r)]; k < offsets_[static_cast<std::size_t>(r + 1)]; ++k)
      t.push_back({columns_[static_cast<std::size_t>(k)], r, values_[static_cast<std::size_t>(k)]});
  return SparseOperator(cols_, rows_, std::move(t));
}

std::vector<double> SparseOperator::to_dense() const {
  std::vector<double> d(static_cast<std::size_t>(rows_ * cols_), 0.0);
  for (Index r = 0; r < rows_; ++r)
    for (Index k = offsets_[static_cast<std::size_t>(r)]; k < offsets_[static_cast<std::size_t>(r + 1)]; ++k)
      d[static_cast<std::size_t>(r * cols_ + columns_[static_cast<std::size_t>(k)])] += values_[static_cast<std::size_t>(k)];
  return d;
}

SparseOperator add(const SparseOperator& a, const SparseOperator& b, double wa, double wb) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("sparse add: shape mismatch");
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(a.nonzeros() + b.nonzeros()));
  for (const auto* m : {&a, &b}) {
    const double w = m == &a ? wa : wb;
    const auto off = m->row_offsets();
    for (Index r = 0; r < m->rows(); ++r)
      for (Index k = off[static_cast<std::size_t>(r)]; k < off[static_cast<std::size_t>(r + 1)]; ++k)
        t.push_back({r, m->columns()[static_cast<std::size_t>(k)], w * m->values()[static_cast<std::size_t>(k)]});
  }
  return SparseOperator(a.rows(), a.cols(), std::move(t));
}

SparseOperator multiply(const SparseOperator& a, const SparseOperator& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("sparse product: shape mismatch");
  std::vector<Triplet> t;
  const auto ao = a.row_offsets();
  const auto bo = b.row_offsets();
  for (Index r = 0; r < a.rows(); ++r)
    for (Index k = ao[static_cast<std::size_t>(r)]; k < ao[static_cast<std::size_t>(r + 1)]; ++k) {
      const Index mid = a.columns()[static_cast<std::size_t>(k)];
      const double av = a.values()[static_cast<std::size_t>(k)];
      for (Index q = bo[static_cast<std::size_t>(mid)]; q < bo[static_cast<std::size_t>(mid + 1)]; ++q)
        t.push_back({r, b.columns()[static_cast<std::size_t>(q)], av * b.values()[static_cast<std::size_t>(q)]});
    }
  return SparseOperator(a.rows(), b.cols(), std::move(t));
}

void block_diag_apply(const SparseOperator& m, std::span<const double> in, std::span<double> out) {
  const auto nc = static_cast<std::size_t>(m.cols());
  const auto nr = static_cast<std::size_t>(m.rows());
  if (in.size() != kComponents * nc || out.size() != kComponents * nr)
    throw std::invalid_argument("block_diag_apply: shape mismatch");
  for (std::size_t k = 0; k < kComponents; ++k)
    m.multiply(in.subspan(k * nc, nc), out.subspan(k * nr, nr));
}

}  // namespace fvdae
