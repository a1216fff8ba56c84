#include "merk/merk.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "merk/errors.hpp"

namespace merk {
namespace {

// Distinct member abscissae of a group, ascending, plus the landing index of
// every member.
struct GroupLandings {
  std::vector<Rational> landings;
  std::vector<std::size_t> member_slot;
};

GroupLandings group_landings(const MerkScheme& scheme, const StageGroup& group) {
  GroupLandings gl;
  for (int i : group.members) gl.landings.push_back(scheme.abscissa(i));
  std::sort(gl.landings.begin(), gl.landings.end());
  gl.landings.erase(std::unique(gl.landings.begin(), gl.landings.end()), gl.landings.end());
  for (int i : group.members) {
    const auto it = std::find(gl.landings.begin(), gl.landings.end(), scheme.abscissa(i));
    gl.member_slot.push_back(static_cast<std::size_t>(it - gl.landings.begin()));
  }
  return gl;
}

}  // namespace

State merk_step(const MerkScheme& scheme, const SplitOdeProblem& problem,
                const FastSolver& stage_solver, const FastSolver& final_solver, double t_n,
                const State& u_n, double macro_step) {
  if (!(macro_step > 0.0)) throw ContractViolation("merk_step requires H > 0");
  if (u_n.size() != problem.dimension()) throw ContractViolation("merk_step: state dimension");

  const State n_n = problem.evaluate_nonlinear(t_n, u_n);
  std::vector<std::optional<State>> d_hat(scheme.stages() + 1);

  const auto& groups = scheme.groups();
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto& group = groups[g];
    GroupLandings gl = group_landings(scheme, group);
    FastIvp ivp{&problem, build_polynomial(scheme, g, n_n, d_hat, macro_step), u_n, macro_step,
                group.end, std::move(gl.landings)};
    std::vector<State> samples;
    try {
      samples = stage_solver(ivp);
    } catch (const FastSolveDiverged& e) {
      throw FastSolveDiverged(to_string(scheme.name()) + " stage group " + std::to_string(g + 1) +
                                  " at t=" + std::to_string(t_n) + ": " + e.what(),
                              e.tau());
    }
    for (std::size_t k = 0; k < group.members.size(); ++k) {
      const int i = group.members[k];
      const double ci = to_double(scheme.abscissa(i));
      State d = problem.evaluate_nonlinear(t_n + ci * macro_step, samples.at(gl.member_slot[k]));
      d -= n_n;
      d_hat[static_cast<std::size_t>(i)] = std::move(d);
    }
  }

  FastIvp final_ivp{&problem,
                    build_polynomial(scheme, MerkScheme::kFinalSlot, n_n, d_hat, macro_step),
                    u_n,
                    macro_step,
                    Rational(1),
                    {Rational(1)}};
  try {
    return final_solver(final_ivp).back();
  } catch (const FastSolveDiverged& e) {
    throw FastSolveDiverged(to_string(scheme.name()) + " final solve at t=" + std::to_string(t_n) +
                                ": " + e.what(),
                            e.tau());
  }
}

State merk_step(const MerkScheme& scheme, const SplitOdeProblem& problem,
                const ButcherTableau& inner_stage, const ButcherTableau& inner_final,
                double t_n, const State& u_n, double macro_step, int m) {
  if (m < 1) throw ContractViolation("merk_step requires m >= 1");
  const double h = macro_step / m;
  return merk_step(scheme, problem, make_erk_solver(inner_stage, h),
                   make_erk_solver(inner_final, h), t_n, u_n, macro_step);
}

std::size_t macro_step_count(double t0, double t_end, double macro_step) {
  if (!(macro_step > 0.0)) throw ContractViolation("macro step must be positive");
  const double ratio = (t_end - t0) / macro_step;
  const double n = std::round(ratio);
  if (n < 0.0 || std::abs(ratio - n) > 1e-9 * std::max(1.0, std::abs(ratio))) {
    throw ContractViolation("macro step " + std::to_string(macro_step) +
                            " does not divide the time interval");
  }
  return static_cast<std::size_t>(n);
}

Trajectory merk_integrate(const MerkScheme& scheme, const SplitOdeProblem& problem,
                          const FastSolver& stage_solver, const FastSolver& final_solver,
                          double macro_step) {
  return integrate_fixed(problem, macro_step, [&](double t, const State& u) {
    return merk_step(scheme, problem, stage_solver, final_solver, t, u, macro_step);
  });
}

Trajectory merk_integrate(const MerkScheme& scheme, const SplitOdeProblem& problem,
                          const ButcherTableau& inner_stage, const ButcherTableau& inner_final,
                          double macro_step, int m) {
  if (m < 1) throw ContractViolation("merk_integrate requires m >= 1");
  const double h = macro_step / m;
  return merk_integrate(scheme, problem, make_erk_solver(inner_stage, h),
                        make_erk_solver(inner_final, h), macro_step);
}

}  // namespace merk
