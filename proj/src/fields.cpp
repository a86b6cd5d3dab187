#include "fvdae/fields.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <ostream>

namespace fvdae::vec {

void axpy(double a, std::span<const double> x, std::span<double> y) {
  check_same(x.size(), y.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

void lincomb(double a, std::span<const double> x, double b, std::span<const double> y,
             std::span<double> out) {
  check_same(x.size(), y.size());
  check_same(x.size(), out.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = a * x[i] + b * y[i];
}

void scale(double a, std::span<double> x) {
  for (double& v : x) v *= a;
}

double dot(std::span<const double> x, std::span<const double> y) {
  check_same(x.size(), y.size());
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

double norm_inf(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

double mean(std::span<const double> x) {
  if (x.empty()) return 0.0;
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

void remove_mean(std::span<double> x) {
  const double m = mean(x);
  for (double& v : x) v -= m;
}

bool all_finite(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace fvdae::vec

namespace fvdae {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_csv(std::ostream& out, const StructuredMesh2D& mesh, const CellScalarField& f) {
  vec::check_same(static_cast<std::size_t>(f.points()), static_cast<std::size_t>(mesh.cell_count()));
  out << "i,x,y,value\n";
  for (Index c = 0; c < f.points(); ++c) {
    const Point x = mesh.cell_centroid(c);
    out << c << ',' << fmt(x.x) << ',' << fmt(x.y) << ',' << fmt(f[c]) << '\n';
  }
}

void write_csv(std::ostream& out, const StructuredMesh2D& mesh, const CellVectorField& f) {
  vec::check_same(static_cast<std::size_t>(f.points()), static_cast<std::size_t>(mesh.cell_count()));
  const Index m = f.points();
  out << "i,x,y,vx,vy\n";
  for (Index c = 0; c < m; ++c) {
    const Point x = mesh.cell_centroid(c);
    out << c << ',' << fmt(x.x) << ',' << fmt(x.y) << ',' << fmt(f[c]) << ',' << fmt(f[m + c]) << '\n';
  }
}

}  // namespace fvdae
