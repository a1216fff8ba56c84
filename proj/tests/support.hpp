#pragma once

#include <cmath>
#include <vector>

#include "merk/harness.hpp"
#include "merk/problem.hpp"
#include "merk/tableau.hpp"

namespace merk::support {

// y' = -y + sin t, y(0) = 1 on [0, 1]; y(t) = 1.5 e^{-t} + (sin t - cos t) / 2.
inline double probe_exact(double t) { return 1.5 * std::exp(-t) + 0.5 * (std::sin(t) - std::cos(t)); }

inline double probe_error(const ButcherTableau& tab, int steps) {
  RkWorkspace ws(tab, 1);
  State y = State::Constant(1, 1.0);
  const double h = 1.0 / steps;
  auto rhs = [](double t, const State& v, State& out) { out[0] = -v[0] + std::sin(t); };
  for (int i = 0; i < steps; ++i) rk_step(tab, rhs, i * h, h, y, ws);
  return std::abs(y[0] - probe_exact(1.0));
}

// Empirical order over four halvings of h, starting at h = 1/4.
inline double probe_order(const ButcherTableau& tab) {
  std::vector<double> hs, errs;
  for (int steps = 4; steps <= 64; steps *= 2) {
    hs.push_back(1.0 / steps);
    errs.push_back(probe_error(tab, steps));
  }
  return harness::fit_rate(hs, errs, 1e-15);
}

// Scalar split problem u' = lambda u + 0 with an explicit dense L.
inline SplitOdeProblem scalar_linear(double lambda) {
  DenseMatrix l(1, 1);
  l(0, 0) = lambda;
  return SplitOdeProblem(
      "scalar", 1, [lambda](const State& u, State& out) { out = lambda * u; },
      [](double, const State&, State& out) { out.setZero(); }, 0.0, 1.0, State::Ones(1), l);
}

}  // namespace merk::support
