#include "fvdae/tableau.hpp"

#include <cmath>
#include <stdexcept>

namespace fvdae {

ButcherTableau::ButcherTableau(std::string name, int stages, std::vector<double> A,
                               std::vector<double> b, std::vector<double> c)
    : name_(std::move(name)), s_(stages), A_(std::move(A)), b_(std::move(b)), c_(std::move(c)) {
  const auto s = static_cast<std::size_t>(s_);
  if (s_ < 1 || A_.size() != s * s || b_.size() != s || c_.size() != s)
    throw std::invalid_argument("tableau " + name_ + ": inconsistent sizes");
  for (int i = 0; i < s_; ++i) {
    if (a(i, i) == 0.0) throw std::invalid_argument("tableau " + name_ + ": zero diagonal");
    double row = 0.0;
    for (int j = 0; j < s_; ++j) {
      if (j > i && a(i, j) != 0.0) throw std::invalid_argument("tableau " + name_ + ": not lower triangular");
      row += a(i, j);
    }
    if (std::abs(row - c_[static_cast<std::size_t>(i)]) > 1e-14)
      throw std::invalid_argument("tableau " + name_ + ": c is not the row sum of A");
  }
  // forward substitution, column by column of the identity
  inv_.assign(s * s, 0.0);
  for (int col = 0; col < s_; ++col)
    for (int i = 0; i < s_; ++i) {
      double v = i == col ? 1.0 : 0.0;
      for (int j = 0; j < i; ++j) v -= a(i, j) * inv_[static_cast<std::size_t>(j * s_ + col)];
      inv_[static_cast<std::size_t>(i * s_ + col)] = v / a(i, i);
    }
}

bool ButcherTableau::stiff_accurate(double tol) const {
  for (int i = 0; i < s_; ++i)
    if (std::abs(b(i) - a(s_ - 1, i)) > tol) return false;
  return true;
}

bool ButcherTableau::low_storage_family1(double tol) const {
  for (int i = 0; i < s_; ++i)
    for (int j = 0; j < i; ++j)
      if (std::abs(a(i, j) - b(j)) > tol) return false;
  return stiff_accurate(tol);
}

bool ButcherTableau::low_storage_family2(double tol) const {
  for (int i = 1; i < s_; ++i) {
    if (a(i, i - 1) == 0.0) return false;
    for (int j = 0; j < i - 1; ++j)
      if (std::abs(a(i, j) - b(j)) > tol) return false;
  }
  return stiff_accurate(tol);
}

double ButcherTableau::stability_at_infinity() const {
  double s = 0.0;
  for (int i = 0; i < s_; ++i)
    for (int j = 0; j < s_; ++j) s += b(i) * inverse(i, j);
  return 1.0 - s;
}

ButcherTableau tableau_euler() { return ButcherTableau("euler", 1, {1.0}, {1.0}, {1.0}); }

ButcherTableau tableau_sdirk2() {
  const double g = 1.0 - std::sqrt(2.0) / 2.0;
  return ButcherTableau("sdirk2", 2, {g, 0.0, 1.0 - g, g}, {1.0 - g, g}, {g, 1.0});
}

ButcherTableau tableau_sdirk3() {
  // root of 6g^3 - 18g^2 + 9g - 1 in (1/6, 1/2), polished by Newton
  double g = 0.4358665215;
  for (int it = 0; it < 8; ++it) {
    const double f = ((6.0 * g - 18.0) * g + 9.0) * g - 1.0;
    const double df = (18.0 * g - 36.0) * g + 9.0;
    g -= f / df;
  }
  const double c2 = 0.5 * (1.0 + g);
  const double b2 = (6.0 * g * g - 20.0 * g + 5.0) / 4.0;
  const double b1 = 1.0 - g - b2;
  return ButcherTableau("sdirk3", 3, {g, 0.0, 0.0, c2 - g, g, 0.0, b1, b2, g}, {b1, b2, g},
                        {g, c2, b1 + b2 + g});
}

ButcherTableau parse_tableau(std::string_view name) {
  if (name == "euler") return tableau_euler();
  if (name == "sdirk2") return tableau_sdirk2();
  if (name == "sdirk3") return tableau_sdirk3();
  throw std::invalid_argument("unknown tableau '" + std::string(name) + "'");
}

const OrderCondition& OrderReport::find(std::string_view name) const {
  for (const auto& c : conditions)
    if (c.name == name) return c;
  throw std::out_of_range("no order condition named " + std::string(name));
}

OrderReport verify_order_conditions(const ButcherTableau& tab, int up_to, double tol) {
  const int s = tab.stages();
  OrderReport rep;
  auto add = [&](std::string name, double value, double target) {
    const double res = value - target;
    rep.conditions.push_back({std::move(name), value, target, res, std::abs(res) <= tol});
    return std::abs(res) <= tol;
  };
  auto sum_b_ck = [&](int k) {
    double v = 0.0;
    for (int i = 0; i < s; ++i) v += tab.b(i) * std::pow(tab.c(i), k);
    return v;
  };

  bool ok = true;
  rep.classical_order = 0;
  for (int p = 1; p <= up_to && p <= 3; ++p) {
    if (p == 1) ok = add("rho(1)", sum_b_ck(0), 1.0) && ok;
    if (p == 2) ok = add("rho(2)", sum_b_ck(1), 0.5) && ok;
    if (p == 3) {
      ok = add("rho(3a)", sum_b_ck(2), 1.0 / 3.0) && ok;
      double v = 0.0;
      for (int i = 0; i < s; ++i)
        for (int j = 0; j < s; ++j) v += tab.b(i) * tab.a(i, j) * tab.c(j);
      ok = add("rho(3b)", v, 1.0 / 6.0) && ok;
    }
    if (ok) rep.classical_order = p;
  }

  for (int k = 2; k <= 3; ++k) {
    double v = 0.0;
    for (int i = 0; i < s; ++i)
      for (int j = 0; j < s; ++j) v += tab.b(i) * tab.inverse(i, j) * std::pow(tab.c(j), k);
    add("rho_y(" + std::to_string(k) + ")", v, 1.0);
  }
  {
    double v = 0.0;
    for (int i = 0; i < s; ++i)
      for (int j = 0; j < s; ++j)
        for (int k = 0; k < s; ++k) v += tab.b(i) * tab.inverse(i, j) * tab.inverse(j, k) * tab.c(k) * tab.c(k);
    add("rho_z(2)", v, 2.0);
  }

  // simplifying conditions
  rep.stage_order = 0;
  for (int q = 1; q <= 4; ++q) {
    bool bq = std::abs(sum_b_ck(q - 1) - 1.0 / q) <= tol;
    bool cq = true;
    for (int i = 0; i < s; ++i) {
      double v = 0.0;
      for (int j = 0; j < s; ++j) v += tab.a(i, j) * std::pow(tab.c(j), q - 1);
      cq = cq && std::abs(v - std::pow(tab.c(i), q) / q) <= tol;
    }
    if (!(bq && cq)) break;
    rep.stage_order = q;
  }
  rep.r_infinity = tab.stability_at_infinity();
  rep.stiff_accurate = tab.stiff_accurate();
  return rep;
}

}  // namespace fvdae
