#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "merk/errors.hpp"
#include "merk/harness.hpp"

using namespace merk;
using namespace merk::harness;
using problems::ProblemId;

namespace {

ConvergenceReport synthetic(const std::vector<double>& hs, const std::vector<double>& errs) {
  ConvergenceReport r;
  for (std::size_t i = 0; i < hs.size(); ++i) {
    ConvergenceRow row;
    row.macro_step = hs[i];
    row.max_error = errs[i];
    r.rows.push_back(row);
  }
  return r;
}

StudyConfig bi_config(Method m) {
  StudyConfig cfg;
  cfg.method = m;
  cfg.problem = ProblemId::kBiDirectional;
  cfg.policy = StepPolicy::fixed_m(default_m(cfg.problem, m));
  cfg.macro_steps = default_macro_steps(cfg.problem, m);
  return cfg;
}

}  // namespace

TEST(FitRate, RecoversCubic) {
  std::vector<double> hs, errs;
  for (int k = 0; k < 6; ++k) {
    hs.push_back(0.1 / std::pow(2.0, k));
    errs.push_back(7.0 * std::pow(hs.back(), 3));
  }
  EXPECT_NEAR(fit_rate(hs, errs), 3.0, 1e-12);
}

TEST(FitRate, DropsPointsBelowCutoff) {
  const std::vector<double> hs{0.4, 0.2, 0.1, 0.05};
  const std::vector<double> errs{1.6e-3, 4e-4, 1e-4, 1e-16};
  EXPECT_NEAR(fit_rate(hs, errs, 1e-13), 2.0, 1e-12);
  EXPECT_THROW((void)fit_rate(hs, {1.0, 1e-14, 1e-15, 1e-16}, 1e-13), InsufficientData);
  EXPECT_THROW((void)fit_rate({0.1, 0.1}, {1e-3, 1e-3}), InsufficientData);
  EXPECT_THROW((void)fit_rate({0.1}, {1e-3, 1e-4}), ContractViolation);
}

TEST(Errors, MaxAbsError) {
  Trajectory traj{{0.0, State{{1.0, 2.0}}}, {0.5, State{{1.0, 2.0}}}, {1.0, State{{3.0, 4.0}}}};
  std::vector<State> ref{State{{9.0, 9.0}}, State{{1.0, 2.0}}, State{{3.0, 4.0}}};
  // the initial point is excluded
  EXPECT_EQ(max_abs_error(traj, ref), 0.0);
  ref[1][1] += 0.25;
  ref[2][0] -= 0.125;
  EXPECT_EQ(max_abs_error(traj, ref), 0.25);
  EXPECT_EQ(final_abs_error(traj, ref), 0.125);
  ref.pop_back();
  EXPECT_THROW((void)max_abs_error(traj, ref), ContractViolation);
}

TEST(StepPolicy, Parse) {
  const auto h = StepPolicy::parse("fixed_h:1e-3");
  EXPECT_EQ(h.kind, StepPolicy::Kind::kFixedH);
  EXPECT_DOUBLE_EQ(h.micro_step(0.1), 1e-3);
  const auto m = StepPolicy::parse("fixed_m:50");
  EXPECT_EQ(m.kind, StepPolicy::Kind::kFixedM);
  EXPECT_DOUBLE_EQ(m.micro_step(0.1), 0.002);
  EXPECT_THROW((void)StepPolicy::parse("fixed_m"), ContractViolation);
  EXPECT_THROW((void)StepPolicy::parse("fixed_m:abc"), ContractViolation);
  EXPECT_THROW((void)StepPolicy::parse("adaptive:1"), ContractViolation);
  EXPECT_THROW((void)StepPolicy::fixed_m(0), ContractViolation);
  EXPECT_THROW((void)StepPolicy::fixed_h(-1.0), ContractViolation);
}

TEST(Methods, NamesAndOrders) {
  for (Method m : all_methods()) EXPECT_EQ(parse_method(to_string(m)), m);
  EXPECT_EQ(nominal_order(Method::kMisKW3), 3);
  EXPECT_EQ(nominal_order(Method::kMERK5), 5);
  EXPECT_THROW((void)parse_method("RK4"), ContractViolation);
}

TEST(StudyConfig, Validation) {
  auto cfg = bi_config(Method::kMERK3);
  EXPECT_NO_THROW(cfg.validate());
  cfg.policy = StepPolicy::fixed_h(1e-4);
  EXPECT_THROW(cfg.validate(), ContractViolation);

  StudyConfig bru;
  bru.method = Method::kMERK3;
  bru.problem = ProblemId::kBrusselator;
  bru.macro_steps = default_macro_steps(bru.problem, bru.method);
  bru.policy = StepPolicy::fixed_m(10);
  EXPECT_THROW(bru.validate(), ContractViolation);
  bru.policy = StepPolicy::fixed_h(1e-3);
  EXPECT_NO_THROW(bru.validate());

  cfg = bi_config(Method::kMERK3);
  cfg.macro_steps = {0.02, 0.01, 0.005};
  EXPECT_THROW(cfg.validate(), ContractViolation);
  cfg.macro_steps = {0.02, 0.01, 0.005, 0.003};
  EXPECT_THROW(cfg.validate(), ContractViolation);
  cfg = bi_config(Method::kMERK3);
  cfg.q = 7;
  EXPECT_THROW(cfg.validate(), ContractViolation);
  cfg = bi_config(Method::kMERK3);
  cfg.jobs = 0;
  EXPECT_THROW(cfg.validate(), ContractViolation);
}

TEST(StudyConfig, InnerOrders) {
  auto cfg = bi_config(Method::kMERK4);
  EXPECT_EQ(cfg.stage_order(), 4);
  EXPECT_EQ(cfg.final_order(), 4);
  cfg.q = 3;
  EXPECT_EQ(cfg.stage_order(), 3);
  cfg = bi_config(Method::kMisKW3);
  EXPECT_EQ(cfg.stage_order(), 3);
}

TEST(Csv, HeaderAndDeterminism) {
  auto cfg = bi_config(Method::kMERK3);
  cfg.jobs = 2;
  const auto a = run_convergence(cfg);
  const auto b = run_convergence(cfg);
  std::ostringstream sa, sb;
  write_csv(a, sa);
  write_csv(b, sb);
  EXPECT_EQ(sa.str(), sb.str());
  const std::string text = sa.str();
  EXPECT_EQ(text.substr(0, text.find('\n')),
            "method,problem,policy,H,h,m,q,r,max_error,slow_calls,fast_calls,total_calls");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 7);
  std::ostringstream side;
  write_sidecar(a, side);
  EXPECT_NE(side.str().find("best_fit_rate "), std::string::npos);
}

TEST(Convergence, RowsSortedAndCountsConsistent) {
  const auto rep = run_convergence(bi_config(Method::kMERK3));
  ASSERT_EQ(rep.rows.size(), 6u);
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    const auto& row = rep.rows[i];
    if (i > 0) {
      EXPECT_LT(row.macro_step, rep.rows[i - 1].macro_step);
      // third order: halving H cuts the error by about 8
      EXPECT_NEAR(rep.rows[i - 1].max_error / row.max_error, 8.0, 2.0);
    }
    const double steps = 2.0 / row.macro_step;
    EXPECT_NEAR(row.slow_calls / steps, 3.0, 1e-9);
    EXPECT_EQ(row.fast_duration, Rational(static_cast<std::int64_t>(std::llround(steps))) * Rational(13, 6));
    EXPECT_EQ(row.total_calls(), row.slow_calls + row.fast_calls);
  }
}

TEST(Convergence, FixedHKeepsFastWorkNearlyConstant) {
  StudyConfig cfg;
  cfg.method = Method::kMERK3;
  cfg.problem = ProblemId::kBrusselator;
  // ceil rounding of short pieces adds work unless H / h stays large
  cfg.policy = StepPolicy::fixed_h(1e-4);
  cfg.macro_steps = default_macro_steps(cfg.problem, cfg.method);
  const auto rep = run_convergence(cfg);
  const double first = static_cast<double>(rep.rows.front().fast_calls);
  for (const auto& row : rep.rows) {
    EXPECT_LT(std::abs(static_cast<double>(row.fast_calls) - first) / first, 0.05) << row.macro_step;
  }
}

TEST(MSweep, Selection) {
  const std::vector<double> hs{0.1, 0.05, 0.025, 0.0125};
  // m = 5 is poor, 25 and 50 are equally good
  std::vector<ConvergenceReport> reps{synthetic(hs, {1e-2, 2e-3, 4e-4, 8e-5}),
                                      synthetic(hs, {1e-3, 1.25e-4, 1.6e-5, 2e-6}),
                                      synthetic(hs, {1e-3, 1.2e-4, 1.5e-5, 2e-6})};
  EXPECT_EQ(select_m_slow_only({5, 25, 50}, reps), 25);
  EXPECT_THROW((void)select_m_slow_only({5, 25}, reps), ContractViolation);

  const auto single = run_msweep(Method::kMERK3, ProblemId::kOneDirectional, {50},
                                 default_macro_steps(ProblemId::kOneDirectional, Method::kMERK3));
  EXPECT_EQ(single.selected, 50);
  EXPECT_EQ(single.selected_total, 50);
  EXPECT_THROW((void)run_msweep(Method::kMERK3, ProblemId::kBrusselator, {10}, {0.1, 0.05, 0.025, 0.0125}),
               ContractViolation);
}

TEST(InnerOrderTable, PublishedEntries) {
  const auto t = inner_order_table(Method::kMERK4);
  ASSERT_EQ(t.size(), 5u);
  EXPECT_EQ(t[2].q, 3);
  EXPECT_EQ(t[2].r, 4);
  EXPECT_DOUBLE_EQ(t[2].expected, 3.99);
  EXPECT_THROW((void)inner_order_table(Method::kMisKW3), ContractViolation);
}
