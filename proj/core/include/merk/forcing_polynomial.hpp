#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "merk/errors.hpp"
#include "merk/state.hpp"

namespace merk {

/// Vector-valued polynomial p(tau) = a_0 + a_1 tau + ... + a_deg tau^deg that
/// forces a fast IVP y' = L y + p(tau).
class ForcingPolynomial {
 public:
  explicit ForcingPolynomial(std::vector<State> coefficients)
      : coeffs_(std::move(coefficients)) {
    if (coeffs_.empty()) {
      throw ContractViolation("forcing polynomial needs at least a_0");
    }
    for (const auto& a : coeffs_) {
      if (a.size() != coeffs_.front().size()) {
        throw ContractViolation("forcing polynomial coefficients differ in size");
      }
    }
  }

  /// Constant polynomial a_0.
  static ForcingPolynomial constant(State a0) {
    std::vector<State> c;
    c.push_back(std::move(a0));
    return ForcingPolynomial(std::move(c));
  }

  std::size_t degree() const { return coeffs_.size() - 1; }
  Eigen::Index dimension() const { return coeffs_.front().size(); }
  const std::vector<State>& coefficients() const { return coeffs_; }
  const State& coefficient(std::size_t j) const { return coeffs_.at(j); }

  /// out = p(tau), Horner form.
  void evaluate(double tau, State& out) const {
    out = coeffs_.back();
    for (std::size_t j = coeffs_.size() - 1; j-- > 0;) {
      out *= tau;
      out += coeffs_[j];
    }
  }

  State operator()(double tau) const {
    State out;
    evaluate(tau, out);
    return out;
  }

 private:
  std::vector<State> coeffs_;
};

}  // namespace merk
