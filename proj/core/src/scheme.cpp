#include "merk/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "merk/errors.hpp"

namespace merk {

std::string to_string(MerkName name) {
  switch (name) {
    case MerkName::kMERK2: return "MERK2";
    case MerkName::kMERK3: return "MERK3";
    case MerkName::kMERK4: return "MERK4";
    case MerkName::kMERK5: return "MERK5";
  }
  return "unknown";
}

MerkScheme::MerkScheme(MerkName name, int order, std::vector<Rational> abscissae,
                       std::vector<StageGroup> groups, std::vector<PolyTerm> final_poly)
    : name_(name),
      order_(order),
      c_(std::move(abscissae)),
      groups_(std::move(groups)),
      final_poly_(std::move(final_poly)) {
  if (c_.empty() || c_.front() != Rational(0)) throw ContractViolation("MERK schemes need c_1 = 0");
  std::vector<bool> seen(c_.size() + 1, false);
  for (auto& g : groups_) {
    if (g.members.empty()) throw ContractViolation("empty stage group");
    Rational end{0};
    for (int i : g.members) {
      if (i < 2 || static_cast<std::size_t>(i) > c_.size()) {
        throw ContractViolation("stage group member out of range");
      }
      if (seen[i]) throw ContractViolation("stage appears in two groups");
      seen[i] = true;
      const auto& ci = c_[i - 1];
      if (!(ci > Rational(0) && ci <= Rational(1))) throw ContractViolation("abscissae must lie in (0, 1]");
      end = std::max(end, ci);
    }
    g.end = end;
  }
  for (std::size_t i = 2; i <= c_.size(); ++i) {
    if (!seen[i]) throw ContractViolation("stage " + std::to_string(i) + " is in no group");
  }
}

const Rational& MerkScheme::abscissa(int stage) const {
  if (stage < 1 || static_cast<std::size_t>(stage) > c_.size()) {
    throw ContractViolation("stage index out of range");
  }
  return c_[stage - 1];
}

std::vector<double> MerkScheme::abscissae_double() const {
  std::vector<double> out;
  out.reserve(c_.size());
  for (const auto& c : c_) out.push_back(to_double(c));
  return out;
}

const std::vector<PolyTerm>& MerkScheme::poly(std::size_t slot) const {
  if (slot == kFinalSlot) return final_poly_;
  if (slot >= groups_.size()) throw ContractViolation("polynomial slot out of range");
  return groups_[slot].poly;
}

int MerkScheme::max_degree() const {
  int deg = 0;
  for (const auto& g : groups_) {
    for (const auto& t : g.poly) deg = std::max(deg, t.power);
  }
  for (const auto& t : final_poly_) deg = std::max(deg, t.power);
  return deg;
}

Rational MerkScheme::fast_duration_per_step() const {
  Rational total{1};
  for (const auto& g : groups_) total += g.end;
  return total;
}

namespace {

void require_distinct(const std::vector<Rational>& nodes, const char* what) {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < nodes.size(); ++j) {
      if (nodes[i] == nodes[j]) throw ContractViolation(std::string(what) + ": repeated abscissa");
    }
  }
}

// Terms of the Lagrange polynomial through (0, 0) and (c_j H, D_j) for the
// given stages, with tau measured in units of H:
//   sum_j D_j * prod_{l != j} (theta - c_l) * theta / (c_j prod_{l != j} (c_j - c_l)).
std::vector<PolyTerm> lagrange_terms(const std::vector<int>& stages,
                                     const std::vector<Rational>& c) {
  std::vector<Rational> nodes;
  for (int s : stages) nodes.push_back(c[s - 1]);
  require_distinct(nodes, "interpolation nodes");
  std::vector<PolyTerm> terms;
  for (std::size_t j = 0; j < stages.size(); ++j) {
    // Numerator polynomial theta * prod_{l != j}(theta - c_l), coefficients
    // ascending in theta.
    std::vector<Rational> poly{Rational(0), Rational(1)};
    Rational denom = nodes[j];
    for (std::size_t l = 0; l < stages.size(); ++l) {
      if (l == j) continue;
      std::vector<Rational> next(poly.size() + 1, Rational(0));
      for (std::size_t k = 0; k < poly.size(); ++k) {
        next[k + 1] += poly[k];
        next[k] -= nodes[l] * poly[k];
      }
      poly = std::move(next);
      denom *= nodes[j] - nodes[l];
    }
    for (std::size_t k = 1; k < poly.size(); ++k) {
      if (poly[k] != Rational(0)) terms.push_back({stages[j], static_cast<int>(k), poly[k] / denom});
    }
  }
  return terms;
}

}  // namespace

MerkScheme make_merk2(Rational c2) {
  if (!(c2 > Rational(0) && c2 <= Rational(1))) throw ContractViolation("MERK2 requires c2 in (0, 1]");
  std::vector<StageGroup> groups{{{2}, {}, {}}};
  std::vector<PolyTerm> final_poly{{2, 1, 1 / c2}};
  return MerkScheme(MerkName::kMERK2, 2, {Rational(0), c2}, std::move(groups),
                    std::move(final_poly));
}

MerkScheme make_merk3(Rational c2) {
  if (!(c2 > Rational(0) && c2 <= Rational(1))) throw ContractViolation("MERK3 requires c2 in (0, 1]");
  const Rational c3(2, 3);
  std::vector<StageGroup> groups{{{2}, {}, {}}, {{3}, {{2, 1, 1 / c2}}, {}}};
  std::vector<PolyTerm> final_poly{{3, 1, Rational(3, 2)}};
  return MerkScheme(MerkName::kMERK3, 3, {Rational(0), c2, c3}, std::move(groups),
                    std::move(final_poly));
}

MerkScheme make_merk4(Rational c2, Rational c3, Rational c4, Rational c5, Rational c6) {
  if (c3 == c4 || c5 == c6) throw ContractViolation("MERK4 requires c3 != c4 and c5 != c6");
  const std::vector<Rational> c{Rational(0), c2, c3, c4, c5, c6};
  // tau/H (-c4/(c3(c3-c4)) D3 + c3/(c4(c3-c4)) D4)
  //   + tau^2/H^2 (1/(c3(c3-c4)) D3 - 1/(c4(c3-c4)) D4)
  auto pair_terms = [](int i, int j, Rational ci, Rational cj) {
    const Rational diff = ci - cj;
    return std::vector<PolyTerm>{{i, 1, -cj / (ci * diff)},
                                 {j, 1, ci / (cj * diff)},
                                 {i, 2, 1 / (ci * diff)},
                                 {j, 2, -1 / (cj * diff)}};
  };
  std::vector<StageGroup> groups{{{2}, {}, {}},
                                 {{3, 4}, {{2, 1, 1 / c2}}, {}},
                                 {{5, 6}, pair_terms(3, 4, c3, c4), {}}};
  return MerkScheme(MerkName::kMERK4, 4, c, std::move(groups), pair_terms(5, 6, c5, c6));
}

MerkScheme make_merk5(const std::vector<Rational>& c2_to_c10) {
  if (c2_to_c10.size() != 9) throw ContractViolation("MERK5 needs abscissae c2..c10");
  std::vector<Rational> c{Rational(0)};
  c.insert(c.end(), c2_to_c10.begin(), c2_to_c10.end());
  std::vector<StageGroup> groups{{{2}, {}, {}},
                                 {{3, 4}, {{2, 1, 1 / c[1]}}, {}},
                                 {{5, 6, 7}, lagrange_terms({3, 4}, c), {}},
                                 {{8, 9, 10}, lagrange_terms({5, 6, 7}, c), {}}};
  return MerkScheme(MerkName::kMERK5, 5, c, std::move(groups), lagrange_terms({8, 9, 10}, c));
}

MerkScheme make_merk(MerkName name) {
  switch (name) {
    case MerkName::kMERK2: return make_merk2();
    case MerkName::kMERK3: return make_merk3();
    case MerkName::kMERK4: return make_merk4();
    case MerkName::kMERK5: return make_merk5();
  }
  throw ContractViolation("unknown MERK scheme");
}

ForcingPolynomial build_polynomial(const MerkScheme& scheme, std::size_t slot, const State& n_n,
                                   const std::vector<std::optional<State>>& d_hat,
                                   double macro_step) {
  if (!(macro_step > 0.0)) throw ContractViolation("build_polynomial requires H > 0");
  const auto& terms = scheme.poly(slot);
  int degree = 0;
  for (const auto& t : terms) degree = std::max(degree, t.power);
  std::vector<State> coeffs(static_cast<std::size_t>(degree) + 1, State::Zero(n_n.size()));
  coeffs[0] = n_n;
  for (const auto& t : terms) {
    if (t.stage < 0 || static_cast<std::size_t>(t.stage) >= d_hat.size() ||
        !d_hat[static_cast<std::size_t>(t.stage)]) {
      throw SchedulingBug(to_string(scheme.name()) + ": polynomial needs D_hat of stage " +
                          std::to_string(t.stage) + " before it was computed");
    }
    const double w = to_double(t.coeff) / std::pow(macro_step, t.power);
    coeffs[static_cast<std::size_t>(t.power)] += w * *d_hat[static_cast<std::size_t>(t.stage)];
  }
  return ForcingPolynomial(std::move(coeffs));
}

}  // namespace merk
