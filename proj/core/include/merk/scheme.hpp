#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "merk/forcing_polynomial.hpp"
#include "merk/rational.hpp"
#include "merk/state.hpp"

namespace merk {

enum class MerkName { kMERK2, kMERK3, kMERK4, kMERK5 };

std::string to_string(MerkName name);

/// Contribution coeff / H^power * D_stage to the tau^power coefficient of a
/// forcing polynomial.
struct PolyTerm {
  int stage;
  int power;
  Rational coeff;
};

/// Stages that share one fast IVP. The IVP runs over [0, end * H] and is
/// sampled at every member abscissa.
struct StageGroup {
  std::vector<int> members;
  std::vector<PolyTerm> poly;
  Rational end{0};
};

/// MERK scheme as data: abscissae, stage groups with their forcing
/// polynomial tables, and the final polynomial table.
class MerkScheme {
 public:
  static constexpr std::size_t kFinalSlot = std::numeric_limits<std::size_t>::max();

  MerkScheme(MerkName name, int order, std::vector<Rational> abscissae,
             std::vector<StageGroup> groups, std::vector<PolyTerm> final_poly);

  MerkName name() const { return name_; }
  int order() const { return order_; }
  /// Number of ExpRK stages s (including the trivial stage 1).
  std::size_t stages() const { return c_.size(); }
  /// c_i for 1-based stage index i.
  const Rational& abscissa(int stage) const;
  const std::vector<Rational>& abscissae() const { return c_; }
  std::vector<double> abscissae_double() const;
  const std::vector<StageGroup>& groups() const { return groups_; }
  const std::vector<PolyTerm>& final_poly() const { return final_poly_; }
  const std::vector<PolyTerm>& poly(std::size_t slot) const;

  /// Highest tau power over all polynomial tables.
  int max_degree() const;
  /// Sum of group ends plus one (the final IVP), in units of H.
  Rational fast_duration_per_step() const;
  /// Evaluations of N per step: N(t_n, u_n) plus one per non-trivial stage.
  std::size_t slow_calls_per_step() const { return stages(); }

 private:
  MerkName name_;
  int order_;
  std::vector<Rational> c_;
  std::vector<StageGroup> groups_;
  std::vector<PolyTerm> final_poly_;
};

MerkScheme make_merk2(Rational c2 = Rational(1, 2));
MerkScheme make_merk3(Rational c2 = Rational(1, 2));
/// Abscissae (c2, c3, c4, c5, c6); c3 != c4 and c5 != c6.
MerkScheme make_merk4(Rational c2 = Rational(1, 2), Rational c3 = Rational(1, 2),
                      Rational c4 = Rational(1, 3), Rational c5 = Rational(5, 6),
                      Rational c6 = Rational(1, 3));
/// Abscissae c2..c10; members of the groups {5,6,7} and {8,9,10} must be
/// pairwise distinct, as must c3 and c4.
MerkScheme make_merk5(const std::vector<Rational>& c2_to_c10 = {
                          Rational(1, 2), Rational(1, 2), Rational(1, 3), Rational(1, 2),
                          Rational(1, 3), Rational(1, 4), Rational(7, 10), Rational(1, 2),
                          Rational(2, 3)});

MerkScheme make_merk(MerkName name);

/// Forcing polynomial of a group slot (or kFinalSlot):
///   a_0 = N_n, a_k += coeff / H^k * D_hat[stage].
/// `d_hat` is indexed by 1-based stage; entries a slot references must be
/// present, otherwise SchedulingBug is thrown.
ForcingPolynomial build_polynomial(const MerkScheme& scheme, std::size_t slot,
                                   const State& n_n,
                                   const std::vector<std::optional<State>>& d_hat,
                                   double macro_step);

}  // namespace merk
