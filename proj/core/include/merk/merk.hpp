#pragma once

#include <utility>
#include <vector>

#include "merk/erk.hpp"
#include "merk/problem.hpp"
#include "merk/scheme.hpp"
#include "merk/tableau.hpp"

namespace merk {

struct TrajectoryPoint {
  double t;
  State u;
};

using Trajectory = std::vector<TrajectoryPoint>;

/// One MERK step from (t_n, u_n) with macro step H. Stage-group IVPs go to
/// `stage_solver`, the final IVP to `final_solver`.
State merk_step(const MerkScheme& scheme, const SplitOdeProblem& problem,
                const FastSolver& stage_solver, const FastSolver& final_solver, double t_n,
                const State& u_n, double macro_step);

/// Convenience form: inner tableaus of orders q (stages) and r (final) with
/// micro step H / m.
State merk_step(const MerkScheme& scheme, const SplitOdeProblem& problem,
                const ButcherTableau& inner_stage, const ButcherTableau& inner_final,
                double t_n, const State& u_n, double macro_step, int m);

/// Number of macro steps covering [t0, t_end]; throws ContractViolation
/// unless (t_end - t0) / H is an integer within 1e-9 relative.
std::size_t macro_step_count(double t0, double t_end, double macro_step);

/// Advances `step` from (t0, u0) to t_end with fixed macro step H. The
/// trajectory includes the initial point.
template <typename Step>
Trajectory integrate_fixed(const SplitOdeProblem& problem, double macro_step, Step&& step) {
  const std::size_t n = macro_step_count(problem.t0(), problem.t_end(), macro_step);
  Trajectory traj;
  traj.reserve(n + 1);
  traj.push_back({problem.t0(), problem.u0()});
  State u = problem.u0();
  for (std::size_t i = 0; i < n; ++i) {
    const double t = problem.t0() + static_cast<double>(i) * macro_step;
    u = step(t, u);
    traj.push_back({problem.t0() + static_cast<double>(i + 1) * macro_step, u});
  }
  return traj;
}

Trajectory merk_integrate(const MerkScheme& scheme, const SplitOdeProblem& problem,
                          const FastSolver& stage_solver, const FastSolver& final_solver,
                          double macro_step);

Trajectory merk_integrate(const MerkScheme& scheme, const SplitOdeProblem& problem,
                          const ButcherTableau& inner_stage, const ButcherTableau& inner_final,
                          double macro_step, int m);

}  // namespace merk
