#pragma once

#include <string>
#include <vector>

#include "merk/state.hpp"

namespace merk {

/// Explicit Runge-Kutta method (strictly lower triangular A).
struct ButcherTableau {
  std::string name;
  int declared_order = 0;
  std::vector<double> c;
  std::vector<std::vector<double>> a;  ///< a[i][j], j < i
  std::vector<double> b;

  std::size_t stages() const { return b.size(); }

  /// Throws ContractViolation unless the tableau is explicit, row-sum
  /// consistent and sum(b) == 1.
  void validate() const;
};

namespace tableaus {

ButcherTableau heun2();
ButcherTableau erk33();
ButcherTableau rk4_classic();
ButcherTableau cash_karp5();   ///< fifth-order weights only
ButcherTableau butcher6();     ///< Butcher's 7-stage order-6 method

}  // namespace tableaus

/// Heun2, ERK33, RK4Classic, CashKarp5, Order6 (orders 2..6).
const std::vector<ButcherTableau>& tableau_catalog();

/// Catalog entry with the given declared order (2..6).
const ButcherTableau& tableau_of_order(int order);

/// Catalog entry by name (case sensitive).
const ButcherTableau& tableau_by_name(const std::string& name);

/// Scratch storage for repeated RK steps of one dimension.
class RkWorkspace {
 public:
  RkWorkspace(const ButcherTableau& tableau, Eigen::Index dimension);
  std::vector<State>& k() { return k_; }
  State& stage() { return stage_; }

 private:
  std::vector<State> k_;
  State stage_;
};

/// One explicit RK step of y' = rhs(t, y) in place. `rhs(t, y, out)` writes
/// into a pre-sized `out`.
template <typename Rhs>
void rk_step(const ButcherTableau& tab, Rhs&& rhs, double t, double h, State& y,
             RkWorkspace& ws) {
  auto& k = ws.k();
  auto& stage = ws.stage();
  const std::size_t s = tab.stages();
  for (std::size_t i = 0; i < s; ++i) {
    stage = y;
    for (std::size_t j = 0; j < i; ++j) {
      const double aij = tab.a[i][j];
      if (aij != 0.0) stage.noalias() += (h * aij) * k[j];
    }
    rhs(t + tab.c[i] * h, stage, k[i]);
  }
  for (std::size_t i = 0; i < s; ++i) {
    if (tab.b[i] != 0.0) y.noalias() += (h * tab.b[i]) * k[i];
  }
}

}  // namespace merk
