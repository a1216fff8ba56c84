#include "merk/problem.hpp"

#include <string>
#include <utility>

#include "merk/errors.hpp"

namespace merk {

struct SplitOdeProblem::Counters {
  std::atomic<std::uint64_t> slow{0};
  std::atomic<std::uint64_t> fast{0};
  mutable std::mutex duration_mutex;
  Rational duration{0};
};

SplitOdeProblem::SplitOdeProblem(std::string name, Eigen::Index dimension,
                                 LinearOp linear, NonlinearOp nonlinear,
                                 double t0, double t_end, State u0,
                                 std::optional<DenseMatrix> dense_linear)
    : name_(std::move(name)),
      dimension_(dimension),
      linear_(std::move(linear)),
      nonlinear_(std::move(nonlinear)),
      t0_(t0),
      t_end_(t_end),
      u0_(std::move(u0)),
      dense_linear_(std::move(dense_linear)),
      counters_(std::make_unique<Counters>()) {
  if (dimension_ < 1) throw ContractViolation("problem dimension must be >= 1");
  if (u0_.size() != dimension_) {
    throw ContractViolation("initial condition has wrong dimension");
  }
  if (dense_linear_ && (dense_linear_->rows() != dimension_ ||
                        dense_linear_->cols() != dimension_)) {
    throw ContractViolation("dense linear operator has wrong shape");
  }
  if (!linear_ || !nonlinear_) {
    throw ContractViolation("linear and nonlinear parts must be provided");
  }
}

// Copies start with fresh counters.
SplitOdeProblem::SplitOdeProblem(const SplitOdeProblem& other)
    : name_(other.name_),
      dimension_(other.dimension_),
      linear_(other.linear_),
      nonlinear_(other.nonlinear_),
      t0_(other.t0_),
      t_end_(other.t_end_),
      u0_(other.u0_),
      dense_linear_(other.dense_linear_),
      counters_(std::make_unique<Counters>()) {}

SplitOdeProblem& SplitOdeProblem::operator=(const SplitOdeProblem& other) {
  if (this != &other) *this = SplitOdeProblem(other);
  return *this;
}

SplitOdeProblem::~SplitOdeProblem() = default;

void SplitOdeProblem::check_dimension(const State& u) const {
  if (u.size() != dimension_) {
    throw ContractViolation("state dimension " + std::to_string(u.size()) +
                            " does not match problem dimension " +
                            std::to_string(dimension_));
  }
}

void SplitOdeProblem::apply_linear(const State& u, State& out) const {
  check_dimension(u);
  out.resize(dimension_);
  linear_(u, out);
}

State SplitOdeProblem::apply_linear(const State& u) const {
  State out(dimension_);
  apply_linear(u, out);
  return out;
}

void SplitOdeProblem::evaluate_nonlinear(double t, const State& u,
                                         State& out) const {
  check_dimension(u);
  out.resize(dimension_);
  nonlinear_(t, u, out);
  counters_->slow.fetch_add(1, std::memory_order_relaxed);
  if (auto bad = first_non_finite(out)) {
    throw ProblemEvaluationDiverged(
        name_ + ": non-finite N component " + std::to_string(*bad) +
            " at t=" + std::to_string(t),
        *bad);
  }
}

State SplitOdeProblem::evaluate_nonlinear(double t, const State& u) const {
  State out(dimension_);
  evaluate_nonlinear(t, u, out);
  return out;
}

State SplitOdeProblem::evaluate_full_rhs(double t, const State& u) const {
  check_dimension(u);
  State lin(dimension_);
  linear_(u, lin);
  State out = evaluate_nonlinear(t, u);
  out += lin;
  if (auto bad = first_non_finite(out)) {
    throw ProblemEvaluationDiverged(
        name_ + ": non-finite F component " + std::to_string(*bad), *bad);
  }
  return out;
}

void SplitOdeProblem::record_fast_calls(std::uint64_t n) const {
  counters_->fast.fetch_add(n, std::memory_order_relaxed);
}

void SplitOdeProblem::record_fast_duration(const Rational& span) const {
  std::lock_guard lock(counters_->duration_mutex);
  counters_->duration += span;
}

EvalCounters SplitOdeProblem::counters_snapshot() const {
  EvalCounters c;
  c.slow_calls = counters_->slow.load(std::memory_order_relaxed);
  c.fast_calls = counters_->fast.load(std::memory_order_relaxed);
  std::lock_guard lock(counters_->duration_mutex);
  c.fast_duration = counters_->duration;
  return c;
}

void SplitOdeProblem::counters_reset() const {
  counters_->slow.store(0, std::memory_order_relaxed);
  counters_->fast.store(0, std::memory_order_relaxed);
  std::lock_guard lock(counters_->duration_mutex);
  counters_->duration = 0;
}

}  // namespace merk
