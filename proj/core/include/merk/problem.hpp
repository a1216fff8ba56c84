#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "merk/rational.hpp"
#include "merk/state.hpp"

namespace merk {

/// Work counters attributed to a problem instance.
struct EvalCounters {
  std::uint64_t slow_calls = 0;  ///< evaluations of N
  std::uint64_t fast_calls = 0;  ///< inner-solver RHS evaluations (L*y + p(tau))
  Rational fast_duration{0};     ///< tau-length integrated at the fast scale, units of H

  std::uint64_t total_calls() const { return slow_calls + fast_calls; }
  friend bool operator==(const EvalCounters&, const EvalCounters&) = default;
};

/// u' = L u + N(t, u) on [t0, t_end].
///
/// The linear part is time independent. Every call of N is counted as a slow
/// call; fast calls and fast duration are recorded by the inner solvers.
/// Counter updates are thread safe, everything else is immutable after
/// construction.
class SplitOdeProblem {
 public:
  /// out = L * u; `out` is pre-sized by the caller.
  using LinearOp = std::function<void(const State& u, State& out)>;
  /// out = N(t, u); `out` is pre-sized by the caller.
  using NonlinearOp = std::function<void(double t, const State& u, State& out)>;

  SplitOdeProblem(std::string name, Eigen::Index dimension, LinearOp linear,
                  NonlinearOp nonlinear, double t0, double t_end, State u0,
                  std::optional<DenseMatrix> dense_linear = std::nullopt);

  SplitOdeProblem(const SplitOdeProblem& other);
  SplitOdeProblem& operator=(const SplitOdeProblem& other);
  SplitOdeProblem(SplitOdeProblem&&) noexcept = default;
  SplitOdeProblem& operator=(SplitOdeProblem&&) noexcept = default;
  ~SplitOdeProblem();

  const std::string& name() const { return name_; }
  Eigen::Index dimension() const { return dimension_; }
  double t0() const { return t0_; }
  double t_end() const { return t_end_; }
  const State& u0() const { return u0_; }
  const std::optional<DenseMatrix>& dense_linear() const { return dense_linear_; }

  /// L * u. Not counted: its cost is part of a fast call.
  void apply_linear(const State& u, State& out) const;
  State apply_linear(const State& u) const;

  /// N(t, u); counts one slow call. Throws ProblemEvaluationDiverged on a
  /// non-finite result.
  void evaluate_nonlinear(double t, const State& u, State& out) const;
  State evaluate_nonlinear(double t, const State& u) const;

  /// F(t, u) = L u + N(t, u); counts one slow call.
  State evaluate_full_rhs(double t, const State& u) const;

  void record_fast_calls(std::uint64_t n) const;
  void record_fast_duration(const Rational& span) const;

  EvalCounters counters_snapshot() const;
  void counters_reset() const;

 private:
  struct Counters;

  void check_dimension(const State& u) const;

  std::string name_;
  Eigen::Index dimension_;
  LinearOp linear_;
  NonlinearOp nonlinear_;
  double t0_;
  double t_end_;
  State u0_;
  std::optional<DenseMatrix> dense_linear_;
  std::unique_ptr<Counters> counters_;
};

}  // namespace merk
