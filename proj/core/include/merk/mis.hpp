#pragma once

#include <string>
#include <vector>

#include "merk/erk.hpp"
#include "merk/merk.hpp"
#include "merk/problem.hpp"
#include "merk/rational.hpp"
#include "merk/tableau.hpp"

namespace merk {

/// Multirate infinitesimal step method: an explicit outer tableau with
/// non-decreasing abscissae plus an inner ERK for the fast stage IVPs.
struct MisScheme {
  std::string name;
  int order = 0;
  std::vector<Rational> c;
  std::vector<std::vector<Rational>> a;
  std::vector<Rational> b;
  ButcherTableau inner;

  std::size_t stages() const { return b.size(); }
  /// Outer tableau as a ButcherTableau (floating point).
  ButcherTableau outer_tableau() const;
  /// Sum of stage interval lengths = c_{s+1} - c_1 = 1.
  Rational fast_duration_per_step() const;
  void validate() const;
};

/// Knoth-Wolke three-stage third-order method, used both as the outer
/// tableau and as the inner ERK.
MisScheme make_mis_kw3();

/// Knoth-Wolke tableau alone.
ButcherTableau knoth_wolke3();

/// One MIS step. Stage i >= 2 solves v' = L v + g_i over [0, (c_i - c_{i-1}) H]
/// from v(0) = Y_{i-1}, with the constant tendency
///   g_i = sum_j (a_ij - a_{i-1,j}) / (c_i - c_{i-1}) N(t_n + c_j H, Y_j),
/// where row s+1 of A is b and c_{s+1} = 1.
State mis_step(const MisScheme& scheme, const SplitOdeProblem& problem,
               const FastSolver& fast_solver, double t_n, const State& u_n, double macro_step);

/// Inner tableau of the scheme with micro step H / m.
State mis_step(const MisScheme& scheme, const SplitOdeProblem& problem, double t_n,
               const State& u_n, double macro_step, int m);

Trajectory mis_integrate(const MisScheme& scheme, const SplitOdeProblem& problem,
                         const FastSolver& fast_solver, double macro_step);

}  // namespace merk
