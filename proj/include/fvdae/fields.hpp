#pragma once

#include <algorithm>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include "fvdae/mesh.hpp"

namespace fvdae {

enum class Location { Cell, Face };

inline constexpr int kComponents = 3;

// Dense field over cells or faces. Vector fields are component-major:
// all x values, then y, then z (z stays zero in 2D).
template <Location Loc, int Comp>
class Field {
public:
  static constexpr Location location = Loc;
  static constexpr int components = Comp;

  Field() = default;
  explicit Field(Index points, double fill = 0.0)
      : points_(points), values_(static_cast<std::size_t>(points * Comp), fill) {}

  Index points() const { return points_; }
  std::size_t size() const { return values_.size(); }

  double& operator[](Index k) { return values_[static_cast<std::size_t>(k)]; }
  double operator[](Index k) const { return values_[static_cast<std::size_t>(k)]; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  std::span<double> component(int k) {
    return std::span<double>(values_).subspan(static_cast<std::size_t>(k * points_),
                                              static_cast<std::size_t>(points_));
  }
  std::span<const double> component(int k) const {
    return std::span<const double>(values_).subspan(static_cast<std::size_t>(k * points_),
                                                    static_cast<std::size_t>(points_));
  }

  void fill(double v) { std::fill(values_.begin(), values_.end(), v); }

  friend bool operator==(const Field&, const Field&) = default;

private:
  Index points_ = 0;
  std::vector<double> values_;
};

using CellScalarField = Field<Location::Cell, 1>;
using FaceScalarField = Field<Location::Face, 1>;
using CellVectorField = Field<Location::Cell, kComponents>;
using FaceVectorField = Field<Location::Face, kComponents>;

inline CellScalarField make_cell_scalar(const StructuredMesh2D& m) { return CellScalarField(m.cell_count()); }
inline FaceScalarField make_face_scalar(const StructuredMesh2D& m) { return FaceScalarField(m.face_count()); }
inline CellVectorField make_cell_vector(const StructuredMesh2D& m) { return CellVectorField(m.cell_count()); }
inline FaceVectorField make_face_vector(const StructuredMesh2D& m) { return FaceVectorField(m.face_count()); }

// span-level kernels
namespace vec {

inline void check_same(std::size_t a, std::size_t b) {
  if (a != b) throw std::invalid_argument("vector length mismatch");
}

// y <- a*x + y
void axpy(double a, std::span<const double> x, std::span<double> y);
// out <- a*x + b*y
void lincomb(double a, std::span<const double> x, double b, std::span<const double> y,
             std::span<double> out);
void scale(double a, std::span<double> x);
double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);
double norm_inf(std::span<const double> x);
double mean(std::span<const double> x);
void remove_mean(std::span<double> x);
bool all_finite(std::span<const double> x);

}  // namespace vec

template <Location L, int C>
Field<L, C> hadamard(const Field<L, C>& a, const Field<L, C>& b) {
  vec::check_same(a.size(), b.size());
  Field<L, C> out(a.points());
  for (std::size_t k = 0; k < a.size(); ++k)
    out.values()[k] = a.values()[k] * b.values()[k];
  return out;
}

template <Location L, int C>
Field<L, C> hadamard_inverse(const Field<L, C>& a) {
  Field<L, C> out(a.points());
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a.values()[k] == 0.0) throw std::domain_error("hadamard inverse of a zero entry");
    out.values()[k] = 1.0 / a.values()[k];
  }
  return out;
}

template <Location L, int C>
Field<L, C> lincomb(double a, const Field<L, C>& x, double b, const Field<L, C>& y) {
  Field<L, C> out(x.points());
  vec::lincomb(a, x.values(), b, y.values(), out.values());
  return out;
}

// {diag(s)} v : scale every component of v pointwise by s
template <Location L>
Field<L, kComponents> scale_components(const Field<L, 1>& s, const Field<L, kComponents>& v) {
  vec::check_same(static_cast<std::size_t>(s.points()), static_cast<std::size_t>(v.points()));
  Field<L, kComponents> out(v.points());
  for (int k = 0; k < kComponents; ++k) {
    auto src = v.component(k);
    auto dst = out.component(k);
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = s.values()[i] * src[i];
  }
  return out;
}

// CSV dump of a cell field: `i,x,y,value` or `i,x,y,vx,vy`.
void write_csv(std::ostream& out, const StructuredMesh2D& mesh, const CellScalarField& f);
void write_csv(std::ostream& out, const StructuredMesh2D& mesh, const CellVectorField& f);

}  // namespace fvdae
