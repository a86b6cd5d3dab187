#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace fvdae {

// Diagonally implicit Runge-Kutta coefficients. `inverse` holds A^{-1}.
class ButcherTableau {
public:
  ButcherTableau(std::string name, int stages, std::vector<double> A, std::vector<double> b,
                 std::vector<double> c);

  const std::string& name() const { return name_; }
  int stages() const { return s_; }
  // 0-based indices
  double a(int i, int j) const { return A_[static_cast<std::size_t>(i * s_ + j)]; }
  double b(int i) const { return b_[static_cast<std::size_t>(i)]; }
  double c(int i) const { return c_[static_cast<std::size_t>(i)]; }
  double inverse(int i, int j) const { return inv_[static_cast<std::size_t>(i * s_ + j)]; }

  bool stiff_accurate(double tol = 1e-15) const;
  // a_ij = b_j for every j < i
  bool low_storage_family1(double tol = 1e-15) const;
  // a_ij = b_j for j < i-1, a_{i,i-1} != 0, stiff-accurate
  bool low_storage_family2(double tol = 1e-15) const;
  // 1 - b^T A^{-1} 1
  double stability_at_infinity() const;

private:
  std::string name_;
  int s_;
  std::vector<double> A_, b_, c_, inv_;
};

ButcherTableau tableau_euler();
ButcherTableau tableau_sdirk2();
ButcherTableau tableau_sdirk3();
ButcherTableau parse_tableau(std::string_view name);

struct OrderCondition {
  std::string name;
  double value = 0.0;
  double target = 0.0;
  double residual = 0.0;  // value - target
  bool satisfied = false;
};

struct OrderReport {
  std::vector<OrderCondition> conditions;
  int classical_order = 0;
  int stage_order = 0;
  double r_infinity = 0.0;
  bool stiff_accurate = false;

  const OrderCondition& find(std::string_view name) const;
};

// Classical conditions rho(1..up_to), index-2 y/z conditions, R(inf) and
// simplifying conditions B(q), C(q).
OrderReport verify_order_conditions(const ButcherTableau& tab, int up_to = 3, double tol = 1e-13);

}  // namespace fvdae
