#pragma once

#include <cmath>
#include <cstddef>
#include <optional>

#include <Eigen/Core>

namespace merk {

using State = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;

/// Index of the first non-finite component, if any.
inline std::optional<std::size_t> first_non_finite(const State& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) return static_cast<std::size_t>(i);
  }
  return std::nullopt;
}

}  // namespace merk
