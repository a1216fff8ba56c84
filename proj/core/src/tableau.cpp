#include "merk/tableau.hpp"

#include <cmath>
#include <string>

#include "merk/errors.hpp"

namespace merk {

void ButcherTableau::validate() const {
  const std::size_t s = b.size();
  if (s == 0 || c.size() != s || a.size() != s) {
    throw ContractViolation(name + ": inconsistent tableau sizes");
  }
  double bsum = 0.0;
  for (std::size_t i = 0; i < s; ++i) {
    if (a[i].size() != s) throw ContractViolation(name + ": A must be s x s");
    double row = 0.0;
    for (std::size_t j = 0; j < s; ++j) {
      if (j >= i && a[i][j] != 0.0) throw ContractViolation(name + ": A is not explicit");
      row += a[i][j];
    }
    if (std::abs(row - c[i]) > 1e-14) {
      throw ContractViolation(name + ": row-sum condition fails in row " + std::to_string(i));
    }
    bsum += b[i];
  }
  if (std::abs(bsum - 1.0) > 1e-14) throw ContractViolation(name + ": weights do not sum to 1");
}

namespace tableaus {

ButcherTableau heun2() {
  return {"Heun2", 2, {0.0, 1.0}, {{0.0, 0.0}, {1.0, 0.0}}, {0.5, 0.5}};
}

ButcherTableau erk33() {
  return {"ERK33",
          3,
          {0.0, 0.5, 1.0},
          {{0.0, 0.0, 0.0}, {0.5, 0.0, 0.0}, {-1.0, 2.0, 0.0}},
          {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0}};
}

ButcherTableau rk4_classic() {
  return {"RK4Classic",
          4,
          {0.0, 0.5, 0.5, 1.0},
          {{0.0, 0.0, 0.0, 0.0}, {0.5, 0.0, 0.0, 0.0}, {0.0, 0.5, 0.0, 0.0}, {0.0, 0.0, 1.0, 0.0}},
          {1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0}};
}

ButcherTableau cash_karp5() {
  return {"CashKarp5",
          5,
          {0.0, 1.0 / 5.0, 3.0 / 10.0, 3.0 / 5.0, 1.0, 7.0 / 8.0},
          {{0, 0, 0, 0, 0, 0},
           {1.0 / 5.0, 0, 0, 0, 0, 0},
           {3.0 / 40.0, 9.0 / 40.0, 0, 0, 0, 0},
           {3.0 / 10.0, -9.0 / 10.0, 6.0 / 5.0, 0, 0, 0},
           {-11.0 / 54.0, 5.0 / 2.0, -70.0 / 27.0, 35.0 / 27.0, 0, 0},
           {1631.0 / 55296.0, 175.0 / 512.0, 575.0 / 13824.0, 44275.0 / 110592.0,
            253.0 / 4096.0, 0}},
          {37.0 / 378.0, 0.0, 250.0 / 621.0, 125.0 / 594.0, 0.0, 512.0 / 1771.0}};
}

ButcherTableau butcher6() {
  return {"Order6",
          6,
          {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0 / 3.0, 0.5, 0.5, 1.0},
          {{0, 0, 0, 0, 0, 0, 0},
           {1.0 / 3.0, 0, 0, 0, 0, 0, 0},
           {0.0, 2.0 / 3.0, 0, 0, 0, 0, 0},
           {1.0 / 12.0, 1.0 / 3.0, -1.0 / 12.0, 0, 0, 0, 0},
           {-1.0 / 16.0, 9.0 / 8.0, -3.0 / 16.0, -3.0 / 8.0, 0, 0, 0},
           {0.0, 9.0 / 8.0, -3.0 / 8.0, -3.0 / 4.0, 0.5, 0, 0},
           {9.0 / 44.0, -9.0 / 11.0, 63.0 / 44.0, 18.0 / 11.0, 0.0, -16.0 / 11.0, 0}},
          {11.0 / 120.0, 0.0, 27.0 / 40.0, 27.0 / 40.0, -4.0 / 15.0, -4.0 / 15.0, 11.0 / 120.0}};
}

}  // namespace tableaus

const std::vector<ButcherTableau>& tableau_catalog() {
  static const std::vector<ButcherTableau> catalog = [] {
    std::vector<ButcherTableau> v{tableaus::heun2(), tableaus::erk33(), tableaus::rk4_classic(),
                                  tableaus::cash_karp5(), tableaus::butcher6()};
    for (const auto& t : v) t.validate();
    return v;
  }();
  return catalog;
}

const ButcherTableau& tableau_of_order(int order) {
  for (const auto& t : tableau_catalog()) {
    if (t.declared_order == order) return t;
  }
  throw ContractViolation("no catalog tableau of order " + std::to_string(order));
}

const ButcherTableau& tableau_by_name(const std::string& name) {
  for (const auto& t : tableau_catalog()) {
    if (t.name == name) return t;
  }
  throw ContractViolation("unknown tableau '" + name + "'");
}

RkWorkspace::RkWorkspace(const ButcherTableau& tableau, Eigen::Index dimension)
    : k_(tableau.stages(), State::Zero(dimension)), stage_(State::Zero(dimension)) {}

}  // namespace merk
