#include "merk/mis.hpp"

#include <string>

#include "merk/errors.hpp"

namespace merk {

ButcherTableau MisScheme::outer_tableau() const {
  ButcherTableau t;
  t.name = name + "-outer";
  t.declared_order = order;
  for (const auto& ci : c) t.c.push_back(to_double(ci));
  for (const auto& row : a) {
    std::vector<double> r;
    for (const auto& x : row) r.push_back(to_double(x));
    t.a.push_back(std::move(r));
  }
  for (const auto& bi : b) t.b.push_back(to_double(bi));
  return t;
}

Rational MisScheme::fast_duration_per_step() const {
  Rational total{0};
  for (std::size_t i = 1; i <= stages(); ++i) {
    const Rational next = i < stages() ? c[i] : Rational(1);
    total += next - c[i - 1];
  }
  return total;
}

void MisScheme::validate() const {
  outer_tableau().validate();
  inner.validate();
  if (c.front() != Rational(0)) throw ContractViolation(name + ": c_1 must be 0");
  for (std::size_t i = 1; i < c.size(); ++i) {
    if (!(c[i] > c[i - 1])) throw ContractViolation(name + ": abscissae must increase");
  }
  if (!(c.back() < Rational(1))) throw ContractViolation(name + ": last abscissa must be < 1");
}

ButcherTableau knoth_wolke3() {
  return {"KnothWolke3",
          3,
          {0.0, 1.0 / 3.0, 3.0 / 4.0},
          {{0.0, 0.0, 0.0}, {1.0 / 3.0, 0.0, 0.0}, {-3.0 / 16.0, 15.0 / 16.0, 0.0}},
          {1.0 / 6.0, 3.0 / 10.0, 8.0 / 15.0}};
}

MisScheme make_mis_kw3() {
  MisScheme s;
  s.name = "MIS-KW3";
  s.order = 3;
  s.c = {Rational(0), Rational(1, 3), Rational(3, 4)};
  s.a = {{Rational(0), Rational(0), Rational(0)},
         {Rational(1, 3), Rational(0), Rational(0)},
         {Rational(-3, 16), Rational(15, 16), Rational(0)}};
  s.b = {Rational(1, 6), Rational(3, 10), Rational(8, 15)};
  s.inner = knoth_wolke3();
  s.validate();
  return s;
}

State mis_step(const MisScheme& scheme, const SplitOdeProblem& problem,
               const FastSolver& fast_solver, double t_n, const State& u_n, double macro_step) {
  if (!(macro_step > 0.0)) throw ContractViolation("mis_step requires H > 0");
  const std::size_t s = scheme.stages();
  auto coeff = [&](std::size_t row, std::size_t j) {
    return row < s ? scheme.a[row][j] : scheme.b[j];
  };
  auto abscissa = [&](std::size_t row) { return row < s ? scheme.c[row] : Rational(1); };

  std::vector<State> slow(s);  // N(t_n + c_j H, Y_j)
  State y = u_n;
  slow[0] = problem.evaluate_nonlinear(t_n, y);
  // Row indices are 0-based here: stage `row` is Y_{row+1}.
  for (std::size_t row = 1; row <= s; ++row) {
    const Rational dc = abscissa(row) - abscissa(row - 1);
    State tendency = State::Zero(problem.dimension());
    for (std::size_t j = 0; j < row; ++j) {
      const Rational w = (coeff(row, j) - coeff(row - 1, j)) / dc;
      if (w != Rational(0)) tendency += to_double(w) * slow[j];
    }
    FastIvp ivp{&problem, ForcingPolynomial::constant(std::move(tendency)), y, macro_step, dc,
                {dc}};
    try {
      y = fast_solver(ivp).back();
    } catch (const FastSolveDiverged& e) {
      throw FastSolveDiverged(scheme.name + " stage " + std::to_string(row + 1) + " at t=" +
                                  std::to_string(t_n) + ": " + e.what(),
                              e.tau());
    }
    if (row < s) {
      slow[row] = problem.evaluate_nonlinear(t_n + to_double(abscissa(row)) * macro_step, y);
    }
  }
  return y;
}

State mis_step(const MisScheme& scheme, const SplitOdeProblem& problem, double t_n,
               const State& u_n, double macro_step, int m) {
  if (m < 1) throw ContractViolation("mis_step requires m >= 1");
  return mis_step(scheme, problem, make_erk_solver(scheme.inner, macro_step / m), t_n, u_n,
                  macro_step);
}

Trajectory mis_integrate(const MisScheme& scheme, const SplitOdeProblem& problem,
                         const FastSolver& fast_solver, double macro_step) {
  return integrate_fixed(problem, macro_step, [&](double t, const State& u) {
    return mis_step(scheme, problem, fast_solver, t, u, macro_step);
  });
}

}  // namespace merk
