#include "merk/erk.hpp"

#include <cmath>
#include <string>

#include "merk/errors.hpp"

namespace merk {

std::vector<double> FastIvp::landing_points() const {
  std::vector<double> out;
  out.reserve(landings.size());
  for (const auto& r : landings) out.push_back(to_double(r) * macro_step);
  return out;
}

void FastIvp::validate() const {
  if (problem == nullptr) throw ContractViolation("fast IVP has no problem");
  if (landings.empty()) throw ContractViolation("fast IVP needs at least one landing point");
  if (!(macro_step > 0.0)) throw ContractViolation("fast IVP needs H > 0");
  if (landings.back() != span) {
    throw ContractViolation("last landing point must equal the interval end");
  }
  Rational prev{0};
  for (const auto& l : landings) {
    if (!(l > prev)) throw ContractViolation("landing points must be increasing and > 0");
    prev = l;
  }
  if (y0.size() != problem->dimension() || forcing.dimension() != problem->dimension()) {
    throw ContractViolation("fast IVP dimension mismatch");
  }
}

std::size_t steps_for_piece(double length, double h_target) {
  if (!(h_target > 0.0)) throw ContractViolation("micro step must be positive");
  const double ratio = length / h_target;
  const auto n = static_cast<std::size_t>(std::ceil(ratio * (1.0 - 1e-10)));
  return n == 0 ? 1 : n;
}

std::vector<double> plan_micro_grid(double interval_end, const std::vector<double>& landing_points,
                                    double h_target) {
  if (!(h_target > 0.0)) throw ContractViolation("micro step must be positive");
  if (landing_points.empty()) throw ContractViolation("landing points must be nonempty");
  std::vector<double> steps;
  double start = 0.0;
  for (const double point : landing_points) {
    if (!(point > start) || point > interval_end) {
      throw ContractViolation("landing points must be sorted within (0, interval_end]");
    }
    const double length = point - start;
    const std::size_t n = steps_for_piece(length, h_target);
    steps.insert(steps.end(), n, length / static_cast<double>(n));
    start = point;
  }
  return steps;
}

std::vector<State> erk_integrate(const ButcherTableau& tableau, const FastIvp& ivp,
                                 double micro_step) {
  ivp.validate();
  if (!(micro_step > 0.0)) throw ContractViolation("micro step must be positive");
  const SplitOdeProblem& problem = *ivp.problem;
  const auto d = problem.dimension();

  RkWorkspace ws(tableau, d);
  State forcing_value(d);
  auto rhs = [&](double tau, const State& y, State& out) {
    problem.apply_linear(y, out);
    ivp.forcing.evaluate(tau, forcing_value);
    out += forcing_value;
  };

  std::vector<State> out;
  out.reserve(ivp.landings.size());
  State y = ivp.y0;
  std::uint64_t calls = 0;
  double piece_start = 0.0;
  for (const auto& landing : ivp.landings) {
    const double piece_end = to_double(landing) * ivp.macro_step;
    const std::size_t n = steps_for_piece(piece_end - piece_start, micro_step);
    const double h = (piece_end - piece_start) / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      // Anchor step times to the piece start to avoid drift.
      const double tau = piece_start + static_cast<double>(i) * h;
      rk_step(tableau, rhs, tau, h, y, ws);
    }
    calls += n * tableau.stages();
    if (auto bad = first_non_finite(y)) {
      problem.record_fast_calls(calls);
      throw FastSolveDiverged(problem.name() + ": fast solve diverged (component " +
                                  std::to_string(*bad) + ")",
                              piece_end);
    }
    out.push_back(y);
    piece_start = piece_end;
  }
  problem.record_fast_calls(calls);
  problem.record_fast_duration(ivp.span);
  return out;
}

FastSolver make_erk_solver(const ButcherTableau& tableau, double micro_step) {
  if (!(micro_step > 0.0)) throw ContractViolation("micro step must be positive");
  return [tableau, micro_step](const FastIvp& ivp) {
    return erk_integrate(tableau, ivp, micro_step);
  };
}

}  // namespace merk
