#include "merk/oracle_checks.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "merk/errors.hpp"
#include "merk/merk.hpp"
#include "merk/problems.hpp"

namespace merk::oracle {

FastSolver make_exact_solver() {
  return [](const FastIvp& ivp) {
    ivp.validate();
    const auto& l = ivp.problem->dense_linear();
    if (!l) throw ContractViolation("exact fast solves need a dense linear operator");
    std::vector<State> out;
    out.reserve(ivp.landings.size());
    for (const Rational& landing : ivp.landings) {
      out.push_back(solve_modified_ivp_exact(*l, ivp.forcing, ivp.y0, to_double(landing) * ivp.macro_step));
    }
    return out;
  };
}

ExpRkScheme exprk_counterpart(MerkName name) {
  switch (name) {
    case MerkName::kMERK2: return ExpRkScheme::kExpRK2;
    case MerkName::kMERK3: return ExpRkScheme::kExpRK3;
    case MerkName::kMERK4: return ExpRkScheme::kExpRK4s6;
    case MerkName::kMERK5: return ExpRkScheme::kExpRK5s10;
  }
  throw ContractViolation("no ExpRK counterpart");
}

double exact_solve_discrepancy(MerkName name, const SplitOdeProblem& problem, double t_n,
                            const State& u_n, double macro_step) {
  const MerkScheme scheme = make_merk(name);
  const FastSolver exact = make_exact_solver();
  const State multirate = merk_step(scheme, problem, exact, exact, t_n, u_n, macro_step);
  const State direct =
      exprk_step(exprk_counterpart(name), scheme.abscissae_double(), problem, t_n, u_n, macro_step);
  const double scale = std::max(direct.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  return (multirate - direct).cwiseAbs().maxCoeff() / scale;
}

double phi_recurrence_residual(int count, int n, int max_k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> entry(-1.0, 1.0);
  std::uniform_real_distribution<double> norm(0.05, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < count; ++trial) {
    DenseMatrix a(n, n);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = entry(rng);
    const double one_norm = a.cwiseAbs().colwise().sum().maxCoeff();
    a *= norm(rng) / one_norm;
    const auto phis = phi_all(max_k, a);
    double factorial = 1.0;
    for (int k = 0; k < max_k; ++k) {
      if (k > 0) factorial *= k;
      const DenseMatrix rhs = phis[k] - DenseMatrix::Identity(n, n) / factorial;
      const DenseMatrix lhs = a * phis[k + 1];
      const double scale = std::max(phis[k].cwiseAbs().maxCoeff(), 1.0 / factorial);
      worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff() / scale);
    }
  }
  return worst;
}

double phi_at_zero_ulps(int max_k, int n) {
  const auto phis = phi_all(max_k, DenseMatrix::Zero(n, n));
  double worst = 0.0;
  double factorial = 1.0;
  for (int k = 0; k <= max_k; ++k) {
    if (k > 0) factorial *= k;
    const DenseMatrix expected = DenseMatrix::Identity(n, n) / factorial;
    const double ulp = std::numeric_limits<double>::epsilon() / factorial;
    worst = std::max(worst, (phis[k] - expected).cwiseAbs().maxCoeff() / ulp);
  }
  return worst;
}

std::vector<CheckResult> run_oracle_checks(std::uint64_t seed) {
  std::vector<CheckResult> out;
  const SplitOdeProblem problem = problems::make_one_directional();
  // Start from an off-trajectory state too, so the check is not tied to u0.
  State shifted(3);
  shifted << 0.3, -0.8, 1.7;
  for (MerkName name : {MerkName::kMERK2, MerkName::kMERK3, MerkName::kMERK4, MerkName::kMERK5}) {
    double worst = 0.0;
    for (double step : {0.1, 0.025}) {
      worst = std::max(worst, exact_solve_discrepancy(name, problem, 0.0, problem.u0(), step));
      worst = std::max(worst, exact_solve_discrepancy(name, problem, 0.4, shifted, step));
    }
    out.push_back({"exact-solve " + to_string(name) + " vs " + std::string(to_string(exprk_counterpart(name))),
                   worst <= 1e-12, worst, 1e-12});
  }
  const double recurrence = phi_recurrence_residual(50, 5, 7, seed);
  out.push_back({"phi recurrence k=1..6, 50 random 5x5", recurrence <= 1e-12, recurrence, 1e-12});
  const double zero = phi_at_zero_ulps(6, 5);
  out.push_back({"phi_k(0) = I/k! (ulps)", zero <= 1.0, zero, 1.0});
  return out;
}

}  // namespace merk::oracle
