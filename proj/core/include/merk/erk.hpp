#pragma once

#include <functional>
#include <vector>

#include "merk/forcing_polynomial.hpp"
#include "merk/problem.hpp"
#include "merk/rational.hpp"
#include "merk/tableau.hpp"

namespace merk {

/// y' = L y + forcing(tau), y(0) = y0, tau in [0, span * H].
///
/// Interval end and landing points are stored as exact fractions of the
/// macro step H so that fast-duration bookkeeping stays exact.
struct FastIvp {
  const SplitOdeProblem* problem = nullptr;
  ForcingPolynomial forcing;
  State y0;
  double macro_step = 0.0;          ///< H
  Rational span{0};                 ///< interval end / H
  std::vector<Rational> landings;   ///< sorted, in (0, span]; last == span

  double interval_end() const { return to_double(span) * macro_step; }
  std::vector<double> landing_points() const;

  /// Throws ContractViolation on an empty, unsorted or out-of-range
  /// landing list.
  void validate() const;
};

/// Split [0, interval_end] at every landing point and cut each piece of
/// length l into ceil(l / h_target) equal steps. Steps in a piece sum to the
/// piece length.
std::vector<double> plan_micro_grid(double interval_end,
                                    const std::vector<double>& landing_points,
                                    double h_target);

/// Number of equal steps covering a piece of length `length` with steps no
/// longer than `h_target`. A relative slack of 1e-10 keeps exact multiples
/// from rounding up.
std::size_t steps_for_piece(double length, double h_target);

/// Integrates a FastIvp with the given tableau and micro step <= h, landing
/// exactly on every landing point. Returns the states at the landing points
/// (same order). Records one fast call per RHS evaluation and `span` of fast
/// duration on the owning problem.
std::vector<State> erk_integrate(const ButcherTableau& tableau, const FastIvp& ivp,
                                 double micro_step);

/// Strategy used by the multirate steppers to solve fast IVPs. Production
/// uses an ERK solver; tests may substitute the exact oracle.
using FastSolver = std::function<std::vector<State>(const FastIvp&)>;

FastSolver make_erk_solver(const ButcherTableau& tableau, double micro_step);

}  // namespace merk
