#pragma once

// Dense matrix exponential, phi-functions and direct exponential Runge-Kutta
// steps. These are ground-truth oracles for small problems only; the
// multirate path never calls them.

#include <string_view>
#include <vector>

#include "merk/forcing_polynomial.hpp"
#include "merk/problem.hpp"
#include "merk/state.hpp"

namespace merk::oracle {

inline constexpr Eigen::Index kMaxOracleDimension = 64;
inline constexpr int kMaxPhiIndex = 8;

/// e^A by scaling and squaring with a [13/13] Pade kernel.
DenseMatrix expm(const DenseMatrix& a);

/// phi_k(A) with phi_0 = exp and phi_k(z) = int_0^1 e^{(1-t)z} t^{k-1}/(k-1)! dt.
/// Computed as a block of the exponential of a (k+1)d x (k+1)d augmented
/// matrix, so no inverse of A is ever formed.
DenseMatrix phi(int k, const DenseMatrix& a);

/// phi_0(A) ... phi_k(A) from a single augmented exponential.
std::vector<DenseMatrix> phi_all(int k, const DenseMatrix& a);

/// Exact solution at tau = T of y' = L y + poly(tau), y(0) = y0:
///   e^{TL} y0 + sum_j j! T^{j+1} phi_{j+1}(TL) a_j.
State solve_modified_ivp_exact(const DenseMatrix& l, const ForcingPolynomial& poly,
                               const State& y0, double t_final);

enum class ExpRkScheme { kExpRK2, kExpRK3, kExpRK4s6, kExpRK5s10 };

std::string_view to_string(ExpRkScheme s);

/// One step of the stiffly accurate ExpRK method evaluated with dense matrix
/// functions. `abscissae` holds c_1 = 0, c_2, ..., c_s (same values as the
/// matching MERK scheme). Requires problem.dense_linear().
State exprk_step(ExpRkScheme scheme, const std::vector<double>& abscissae,
                 const SplitOdeProblem& problem, double t_n, const State& u_n,
                 double step);

}  // namespace merk::oracle
