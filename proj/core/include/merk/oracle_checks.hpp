#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "merk/erk.hpp"
#include "merk/phi.hpp"
#include "merk/scheme.hpp"

namespace merk::oracle {

/// Fast solver that integrates each FastIvp exactly with matrix functions.
/// Requires the owning problem to expose a dense L.
FastSolver make_exact_solver();

ExpRkScheme exprk_counterpart(MerkName name);

/// Relative max-norm difference between one MERK step with exact fast solves
/// and one step of the matching ExpRK method.
double exact_solve_discrepancy(MerkName name, const SplitOdeProblem& problem, double t_n,
                            const State& u_n, double macro_step);

/// Worst relative residual of A phi_{k+1}(A) = phi_k(A) - I/k!, k = 0..max_k-1,
/// over `count` random n x n matrices with ||A||_1 <= 1.
double phi_recurrence_residual(int count, int n, int max_k, std::uint64_t seed);

/// Worst |phi_k(0) - I/k!| scaled by k!/eps, k = 0..max_k.
double phi_at_zero_ulps(int max_k, int n);

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double tolerance = 0.0;
};

std::vector<CheckResult> run_oracle_checks(std::uint64_t seed = 20240611);

}  // namespace merk::oracle
