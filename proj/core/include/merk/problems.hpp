#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "merk/problem.hpp"

namespace merk::problems {

enum class ProblemId { kReactionDiffusion, kBrusselator, kOneDirectional, kBiDirectional };

/// Category I problems run with a fixed micro step h, category II with a
/// fixed separation factor m.
enum class Category { kI, kII };

enum class ReferenceKind { kAnalytic, kExpmExact, kFineRk };

struct ProblemSpec {
  ProblemId id;
  std::string_view name;
  Category category;
  ReferenceKind reference;
};

const std::vector<ProblemSpec>& problem_catalog();
const ProblemSpec& spec_of(ProblemId id);
/// Accepts the catalog names (reaction_diffusion, brusselator,
/// one_directional, bi_directional).
ProblemId parse_problem_id(std::string_view name);
std::string_view to_string(ProblemId id);

/// u_t = u_xx / 100 + u^2 (1 - u) on [0, 5] x (0, 3] with homogeneous Neumann
/// ends, discretized on `n_points` nodes including both boundaries.
SplitOdeProblem make_reaction_diffusion(int n_points = 1000);
double reaction_diffusion_initial(double x);

/// Brusselator with a = 1, b = 3.5, 1/eps = 100 on (0, 2]; L = diag(0, 0, -100).
SplitOdeProblem make_brusselator();

/// Linear test with fast variables driving the slow one, on (0, 1].
SplitOdeProblem make_one_directional();
State analytic_solution_one_directional(double t);

/// Linear test with two-way coupling, on (0, 2].
SplitOdeProblem make_bi_directional();
DenseMatrix bi_directional_full_matrix();

SplitOdeProblem make_problem(ProblemId id);

/// Reference values of a problem at macro grid points.
class ReferenceSolution {
 public:
  using Evaluator = std::function<State(double)>;

  static ReferenceSolution from_function(ReferenceKind kind, Evaluator f);
  /// Values at t0 + k * spacing, k = 0..values.size()-1.
  static ReferenceSolution tabulated(double t0, double spacing, std::vector<State> values);

  ReferenceKind kind() const { return kind_; }
  /// Throws ContractViolation for times off the tabulated grid.
  State at(double t) const;

 private:
  ReferenceKind kind_ = ReferenceKind::kAnalytic;
  Evaluator eval_;
  double t0_ = 0.0;
  double spacing_ = 0.0;
  std::vector<State> values_;
};

/// Fine-step Cash-Karp solution of the full RHS, landing on every multiple of
/// `spacing`, with steps no longer than `h_ref`.
std::vector<State> fine_rk_solution(const SplitOdeProblem& problem, double spacing, double h_ref);

/// Directory for cached fine references: $MERK_REFERENCE_CACHE if set,
/// otherwise <tmp>/merk-reference-cache. Empty optional disables caching.
std::optional<std::filesystem::path> default_cache_dir();

/// Reference for `id` on the grid t0 + k * spacing. Fine-RK references use
/// `h_ref` and are cached in `cache_dir` when given.
ReferenceSolution make_reference(ProblemId id, double spacing, double h_ref,
                                 const std::optional<std::filesystem::path>& cache_dir);

}  // namespace merk::problems
