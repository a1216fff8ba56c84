#include <gtest/gtest.h>

#include <map>
#include <optional>

#include "merk/errors.hpp"
#include "merk/scheme.hpp"

using namespace merk;

namespace {

// Coefficient of tau^power / H^power multiplying D_stage in a slot.
Rational coeff(const MerkScheme& s, std::size_t slot, int stage, int power) {
  Rational sum{0};
  for (const auto& t : s.poly(slot)) {
    if (t.stage == stage && t.power == power) sum += t.coeff;
  }
  return sum;
}

std::vector<std::optional<State>> d_hat_all(std::size_t stages, Eigen::Index d) {
  std::vector<std::optional<State>> out(stages + 1);
  for (std::size_t i = 2; i <= stages; ++i) out[i] = State::Random(d);
  return out;
}

double r2d(const Rational& r) { return to_double(r); }

}  // namespace

TEST(Scheme, Abscissae) {
  EXPECT_EQ(make_merk(MerkName::kMERK3).abscissa(2), Rational(1, 2));
  EXPECT_EQ(make_merk(MerkName::kMERK3).abscissa(3), Rational(2, 3));
  const auto m4 = make_merk(MerkName::kMERK4);
  const Rational c4[] = {Rational(0), Rational(1, 2), Rational(1, 2), Rational(1, 3), Rational(5, 6), Rational(1, 3)};
  for (int i = 1; i <= 6; ++i) EXPECT_EQ(m4.abscissa(i), c4[i - 1]) << i;
  const auto m5 = make_merk(MerkName::kMERK5);
  const Rational c5[] = {Rational(0),    Rational(1, 2), Rational(1, 2), Rational(1, 3), Rational(1, 2),
                         Rational(1, 3), Rational(1, 4), Rational(7, 10), Rational(1, 2), Rational(2, 3)};
  for (int i = 1; i <= 10; ++i) EXPECT_EQ(m5.abscissa(i), c5[i - 1]) << i;
  EXPECT_THROW((void)m5.abscissa(11), ContractViolation);
}

TEST(Scheme, FastDurationPerStep) {
  EXPECT_EQ(make_merk(MerkName::kMERK3).fast_duration_per_step(), Rational(13, 6));
  EXPECT_EQ(make_merk(MerkName::kMERK4).fast_duration_per_step(), Rational(17, 6));
  EXPECT_EQ(make_merk(MerkName::kMERK5).fast_duration_per_step(), Rational(16, 5));
  EXPECT_EQ(make_merk(MerkName::kMERK2).fast_duration_per_step(), Rational(3, 2));
  EXPECT_EQ(make_merk2(Rational(1, 3)).fast_duration_per_step(), Rational(4, 3));
}

TEST(Scheme, SlowCallsPerStep) {
  EXPECT_EQ(make_merk(MerkName::kMERK2).slow_calls_per_step(), 2u);
  EXPECT_EQ(make_merk(MerkName::kMERK3).slow_calls_per_step(), 3u);
  EXPECT_EQ(make_merk(MerkName::kMERK4).slow_calls_per_step(), 6u);
  EXPECT_EQ(make_merk(MerkName::kMERK5).slow_calls_per_step(), 10u);
}

TEST(Scheme, GroupsCoverStagesAndEndsBoundMembers) {
  for (auto name : {MerkName::kMERK2, MerkName::kMERK3, MerkName::kMERK4, MerkName::kMERK5}) {
    const auto s = make_merk(name);
    std::vector<int> seen(s.stages() + 1, 0);
    for (const auto& g : s.groups()) {
      for (int m : g.members) {
        ++seen[m];
        EXPECT_LE(s.abscissa(m), g.end);
      }
    }
    for (std::size_t i = 2; i <= s.stages(); ++i) EXPECT_EQ(seen[i], 1) << to_string(name) << " " << i;
  }
  const auto m5 = make_merk(MerkName::kMERK5);
  ASSERT_EQ(m5.groups().size(), 4u);
  EXPECT_EQ(m5.groups()[3].members, (std::vector<int>{8, 9, 10}));
  EXPECT_EQ(m5.groups()[3].end, Rational(7, 10));
}

TEST(Scheme, MaxDegree) {
  EXPECT_EQ(make_merk(MerkName::kMERK3).max_degree(), 1);
  EXPECT_EQ(make_merk(MerkName::kMERK4).max_degree(), 2);
  EXPECT_EQ(make_merk(MerkName::kMERK5).max_degree(), 3);
}

TEST(Scheme, ConstructorRejectsBadLayouts) {
  EXPECT_THROW((void)make_merk2(Rational(0)), ContractViolation);
  EXPECT_THROW((void)make_merk2(Rational(3, 2)), ContractViolation);
  EXPECT_THROW((void)make_merk4(Rational(1, 2), Rational(1, 3), Rational(1, 3)), ContractViolation);
  // stage 3 missing from every group
  EXPECT_THROW(MerkScheme(MerkName::kMERK3, 3, {Rational(0), Rational(1, 2), Rational(2, 3)},
                          {StageGroup{{2}, {}, {}}}, {}),
               ContractViolation);
  // c_1 != 0
  EXPECT_THROW(MerkScheme(MerkName::kMERK2, 2, {Rational(1, 4), Rational(1, 2)}, {StageGroup{{2}, {}, {}}}, {}),
               ContractViolation);
}

TEST(BuildPolynomial, Merk3Final) {
  const auto s = make_merk(MerkName::kMERK3);
  const double H = 0.2;
  const State n = State::Random(2);
  auto d = d_hat_all(3, 2);
  const auto p = build_polynomial(s, MerkScheme::kFinalSlot, n, d, H);
  ASSERT_EQ(p.degree(), 1u);
  EXPECT_EQ(p.coefficient(0), n);
  EXPECT_TRUE(p.coefficient(1).isApprox(3.0 / (2.0 * H) * *d[3]));
}

TEST(BuildPolynomial, ZeroDifferencesGiveConstant) {
  for (auto name : {MerkName::kMERK3, MerkName::kMERK4, MerkName::kMERK5}) {
    const auto s = make_merk(name);
    const State n = State::Random(3);
    std::vector<std::optional<State>> d(s.stages() + 1);
    for (std::size_t i = 2; i <= s.stages(); ++i) d[i] = State::Zero(3);
    for (std::size_t slot = 0; slot < s.groups().size(); ++slot) {
      const auto p = build_polynomial(s, slot, n, d, 0.1);
      for (double tau : {0.0, 0.03, 0.1}) EXPECT_EQ(p(tau), n);
    }
    EXPECT_EQ(build_polynomial(s, MerkScheme::kFinalSlot, n, d, 0.1)(0.07), n);
  }
}

TEST(BuildPolynomial, Merk4SecondPairGroup) {
  const auto s = make_merk(MerkName::kMERK4);
  // slot 2 is group {5, 6}, driven by D3 and D4
  EXPECT_EQ(coeff(s, 2, 3, 1), Rational(-4));
  EXPECT_EQ(coeff(s, 2, 4, 1), Rational(9));
  EXPECT_EQ(coeff(s, 2, 3, 2), Rational(12));
  EXPECT_EQ(coeff(s, 2, 4, 2), Rational(-18));
  const double H = 0.25;
  const State n = State::Random(1);
  auto d = d_hat_all(6, 1);
  const auto p = build_polynomial(s, 2, n, d, H);
  EXPECT_NEAR(p.coefficient(1)[0], (-4.0 * (*d[3])[0] + 9.0 * (*d[4])[0]) / H, 1e-13);
  EXPECT_NEAR(p.coefficient(2)[0], (12.0 * (*d[3])[0] - 18.0 * (*d[4])[0]) / (H * H), 1e-12);
}

TEST(BuildPolynomial, MissingDifferenceIsSchedulingBug) {
  const auto s = make_merk(MerkName::kMERK4);
  std::vector<std::optional<State>> d(7);
  d[3] = State::Zero(2);
  EXPECT_THROW((void)build_polynomial(s, 2, State::Zero(2), d, 0.1), SchedulingBug);
}

// Every slot polynomial interpolates N_n + D_j at tau = c_j H for each stage
// it references.
TEST(BuildPolynomial, InterpolatesReferencedStages) {
  for (auto name : {MerkName::kMERK2, MerkName::kMERK3, MerkName::kMERK4, MerkName::kMERK5}) {
    const auto s = make_merk(name);
    const double H = 0.3;
    const State n = State::Random(2);
    const auto d = d_hat_all(s.stages(), 2);
    std::vector<std::size_t> slots;
    for (std::size_t k = 0; k < s.groups().size(); ++k) slots.push_back(k);
    slots.push_back(MerkScheme::kFinalSlot);
    for (auto slot : slots) {
      const auto p = build_polynomial(s, slot, n, d, H);
      EXPECT_EQ(p(0.0), n);
      std::map<int, bool> stages;
      for (const auto& t : s.poly(slot)) stages[t.stage] = true;
      for (const auto& [j, unused] : stages) {
        const State at = p(to_double(s.abscissa(j)) * H);
        EXPECT_LE((at - (n + *d[j])).cwiseAbs().maxCoeff(), 1e-12) << to_string(name) << " stage " << j;
      }
    }
  }
}

// MERK5 tables against the named alpha/beta/gamma coefficient formulas.
TEST(BuildPolynomial, Merk5NamedCoefficients) {
  const auto s = make_merk(MerkName::kMERK5);
  std::vector<double> c(11);
  for (int i = 1; i <= 10; ++i) c[i] = r2d(s.abscissa(i));
  const double a3 = c[4] / (c[3] * (c[4] - c[3])), a4 = c[3] / (c[4] * (c[3] - c[4]));
  const double b3 = 2.0 / (c[3] * (c[3] - c[4])), b4 = 2.0 / (c[4] * (c[3] - c[4]));
  auto triple = [&](int i, int j, int k) {
    const double den = c[i] * (c[i] - c[j]) * (c[i] - c[k]);
    return std::array<double, 3>{c[j] * c[k] / den, 2.0 * (c[j] + c[k]) / den, 6.0 / den};
  };
  const auto t5 = triple(5, 6, 7), t6 = triple(6, 5, 7), t7 = triple(7, 5, 6);
  const auto t8 = triple(8, 9, 10), t9 = triple(9, 8, 10), t10 = triple(10, 8, 9);

  EXPECT_NEAR(r2d(coeff(s, 1, 2, 1)), 1.0 / c[2], 1e-14);
  EXPECT_NEAR(r2d(coeff(s, 2, 3, 1)), a3, 1e-12);
  EXPECT_NEAR(r2d(coeff(s, 2, 4, 1)), a4, 1e-12);
  EXPECT_NEAR(r2d(coeff(s, 2, 3, 2)), b3 / 2.0, 1e-12);
  EXPECT_NEAR(r2d(coeff(s, 2, 4, 2)), -b4 / 2.0, 1e-12);

  const std::pair<int, std::array<double, 3>> g3[] = {{5, t5}, {6, t6}, {7, t7}};
  for (const auto& [j, t] : g3) {
    EXPECT_NEAR(r2d(coeff(s, 3, j, 1)), t[0], 1e-11) << j;
    EXPECT_NEAR(r2d(coeff(s, 3, j, 2)), -t[1] / 2.0, 1e-11) << j;
    EXPECT_NEAR(r2d(coeff(s, 3, j, 3)), t[2] / 6.0, 1e-11) << j;
  }
  const std::pair<int, std::array<double, 3>> fin[] = {{8, t8}, {9, t9}, {10, t10}};
  for (const auto& [j, t] : fin) {
    EXPECT_NEAR(r2d(coeff(s, MerkScheme::kFinalSlot, j, 1)), t[0], 1e-11) << j;
    EXPECT_NEAR(r2d(coeff(s, MerkScheme::kFinalSlot, j, 2)), -t[1] / 2.0, 1e-11) << j;
    EXPECT_NEAR(r2d(coeff(s, MerkScheme::kFinalSlot, j, 3)), t[2] / 6.0, 1e-11) << j;
  }
}
