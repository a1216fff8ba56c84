// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
// failure. Details for each criterion are printed underneath its line.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <iterator>
#include <string>
#include <vector>

#include "merk/harness.hpp"
#include "merk/merk.hpp"
#include "merk/mis.hpp"
#include "merk/oracle_checks.hpp"
#include "merk/problems.hpp"
#include "merk/scheme.hpp"
#include "merk/tableau.hpp"
#include "support.hpp"

using namespace merk;
using harness::Method;
using problems::ProblemId;

namespace {

struct Outcome {
  bool passed = true;
  std::vector<std::string> details;

  void check(bool ok, const char* fmt, ...) __attribute__((format(printf, 3, 4)));
};

void Outcome::check(bool ok, const char* fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, args);
  va_end(args);
  details.push_back(std::string(ok ? "ok   " : "MISS ") + buf);
  passed = passed && ok;
}

const Method kMerks[] = {Method::kMERK3, Method::kMERK4, Method::kMERK5};
const Method kAll[] = {Method::kMERK3, Method::kMERK4, Method::kMERK5, Method::kMisKW3};

std::string nm(Method m) { return std::string(harness::to_string(m)); }

MerkName merk_of(Method m) {
  switch (m) {
    case Method::kMERK2: return MerkName::kMERK2;
    case Method::kMERK3: return MerkName::kMERK3;
    case Method::kMERK4: return MerkName::kMERK4;
    default: return MerkName::kMERK5;
  }
}

harness::StudyConfig category_ii(Method m, ProblemId p) {
  harness::StudyConfig cfg;
  cfg.method = m;
  cfg.problem = p;
  cfg.policy = harness::StepPolicy::fixed_m(harness::default_m(p, m));
  cfg.macro_steps = harness::default_macro_steps(p, m);
  return cfg;
}

harness::StudyConfig category_i(Method m, ProblemId p, double h) {
  harness::StudyConfig cfg;
  cfg.method = m;
  cfg.problem = p;
  cfg.policy = harness::StepPolicy::fixed_h(h);
  cfg.macro_steps = harness::default_macro_steps(p, m);
  return cfg;
}

std::size_t halvings(const harness::StudyConfig& cfg) {
  const auto [lo, hi] = std::minmax_element(cfg.macro_steps.begin(), cfg.macro_steps.end());
  return static_cast<std::size_t>(std::lround(std::log2(*hi / *lo)));
}

// 1
Outcome exact_solve() {
  Outcome o;
  const auto p = problems::make_one_directional();
  const State shifted{{0.3, -0.8, 1.7}};
  for (auto n : {MerkName::kMERK2, MerkName::kMERK3, MerkName::kMERK4, MerkName::kMERK5}) {
    double worst = 0.0;
    for (double H : {0.1, 0.05, 0.01}) {
      worst = std::max(worst, oracle::exact_solve_discrepancy(n, p, 0.0, p.u0(), H));
      worst = std::max(worst, oracle::exact_solve_discrepancy(n, p, 0.4, shifted, H));
    }
    o.check(worst <= 1e-12, "%s vs %s: %.2e (<= 1e-12)", to_string(n).c_str(),
            std::string(oracle::to_string(oracle::exprk_counterpart(n))).c_str(), worst);
  }
  return o;
}

// 2
Outcome phi_suite() {
  Outcome o;
  const double rec = oracle::phi_recurrence_residual(50, 5, 7, 20240611);
  o.check(rec <= 1e-12, "recurrence k=1..6, 50 random 5x5: %.2e (<= 1e-12)", rec);
  const double ulps = oracle::phi_at_zero_ulps(6, 5);
  o.check(ulps <= 1.0, "phi_k(0) = I/k!: %.2f ulp (<= 1)", ulps);
  return o;
}

// 3
Outcome bi_directional() {
  Outcome o;
  for (Method m : kAll) {
    const auto cfg = category_ii(m, ProblemId::kBiDirectional);
    const double rate = harness::run_convergence(cfg).best_fit_rate;
    const int p = harness::nominal_order(m);
    o.check(std::abs(rate - p) <= 0.35 && halvings(cfg) >= 5, "%s m=%d: rate %.3f (%d +- 0.35), %zu halvings",
            nm(m).c_str(), harness::default_m(cfg.problem, m), rate, p, halvings(cfg));
  }
  return o;
}

// 4
Outcome one_directional() {
  Outcome o;
  const double lower[] = {3.0, 4.0, 4.9};
  int k = 0;
  for (Method m : kAll) {
    const auto cfg = category_ii(m, ProblemId::kOneDirectional);
    const double rate = harness::run_convergence(cfg).best_fit_rate;
    const int mm = harness::default_m(cfg.problem, m);
    if (m == Method::kMisKW3) {
      o.check(std::abs(rate - 3.0) <= 0.35, "%s m=%d: rate %.3f (3 +- 0.35)", nm(m).c_str(), mm, rate);
    } else {
      o.check(rate >= lower[k], "%s m=%d: rate %.3f (>= %.1f)", nm(m).c_str(), mm, rate, lower[k]);
    }
    ++k;
  }
  return o;
}

// 5
Outcome inner_order_table() {
  Outcome o;
  for (Method m : kMerks) {
    for (const auto& e : harness::run_inner_order_study(m)) {
      o.check(std::abs(e.observed - e.expected) <= 0.25, "%s (q,r)=(%d,%d): %.3f vs %.2f", nm(m).c_str(), e.q, e.r,
              e.observed, e.expected);
    }
  }
  return o;
}

// 6
Outcome fast_duration() {
  Outcome o;
  const auto p = problems::make_one_directional();
  const double H = 0.1;
  const Rational steps(10);
  const Rational expect[] = {Rational(13, 6), Rational(17, 6), Rational(16, 5)};
  int k = 0;
  for (Method m : kMerks) {
    const auto scheme = make_merk(merk_of(m));
    const auto& tab = tableau_of_order(scheme.order());
    p.counters_reset();
    (void)merk_integrate(scheme, p, tab, tab, H, 25);
    const Rational per_step = p.counters_snapshot().fast_duration / steps;
    o.check(per_step == expect[k] && scheme.fast_duration_per_step() == expect[k], "%s: %s per step (%s)",
            nm(m).c_str(), to_string(per_step).c_str(), to_string(expect[k]).c_str());
    ++k;
  }
  const auto mis = make_mis_kw3();
  p.counters_reset();
  (void)mis_integrate(mis, p, make_erk_solver(mis.inner, H / 25), H);
  const Rational per_step = p.counters_snapshot().fast_duration / steps;
  o.check(per_step == Rational(1), "MIS-KW3: %s per step (1)", to_string(per_step).c_str());
  return o;
}

// 7
Outcome slow_calls() {
  Outcome o;
  const auto p = problems::make_bi_directional();
  const std::uint64_t expect[] = {3, 6, 10};
  int k = 0;
  for (Method m : kMerks) {
    const auto scheme = make_merk(merk_of(m));
    const auto& tab = tableau_of_order(scheme.order());
    bool constant = true;
    std::uint64_t seen = 0;
    for (double H : {0.1, 0.05, 0.025, 0.0125}) {
      p.counters_reset();
      (void)merk_integrate(scheme, p, tab, tab, H, 5);
      const std::uint64_t steps = std::llround(2.0 / H);
      const std::uint64_t calls = p.counters_snapshot().slow_calls;
      constant = constant && calls == expect[k] * steps;
      seen = calls / steps;
    }
    o.check(constant, "%s: %llu per step at every H (%llu)", nm(m).c_str(), static_cast<unsigned long long>(seen),
            static_cast<unsigned long long>(expect[k]));
    ++k;
  }
  return o;
}

// 8
Outcome category_i_runs() {
  Outcome o;
  const double bru[] = {2.3, 3.3, 3.9, 2.3};
  const double rd[] = {2.7, 3.75, 4.5, 2.7};
  int k = 0;
  for (Method m : kAll) {
    const double rate = harness::run_convergence(category_i(m, ProblemId::kBrusselator, 1e-3)).best_fit_rate;
    o.check(rate >= bru[k], "brusselator %s h=1e-3: rate %.3f (>= %.2f)", nm(m).c_str(), rate, bru[k]);
    ++k;
  }
  k = 0;
  for (Method m : kAll) {
    auto cfg = category_i(m, ProblemId::kReactionDiffusion, 1e-3);
    const double rate = harness::run_convergence(cfg).best_fit_rate;
    cfg.metric = harness::ErrorMetric::kFinalTime;
    const double final_rate = harness::run_convergence(cfg).best_fit_rate;
    o.check(rate >= rd[k], "reaction_diffusion %s h=1e-3: rate %.3f (>= %.2f); final-time rate %.3f", nm(m).c_str(),
            rate, rd[k], final_rate);
    ++k;
  }
  return o;
}

// 9
Outcome msweep() {
  Outcome o;
  const auto grid = harness::default_m_list();
  const int expect[] = {75, 50, 25, 75};
  int k = 0;
  for (Method m : kAll) {
    const auto res = harness::run_msweep(m, ProblemId::kOneDirectional, grid,
                                         harness::default_macro_steps(ProblemId::kOneDirectional, m));
    const auto pos = [&](int v) { return std::distance(grid.begin(), std::find(grid.begin(), grid.end(), v)); };
    o.check(std::abs(pos(res.selected) - pos(expect[k])) <= 1, "%s: selected m=%d (%d; total-calls plot %d)",
            nm(m).c_str(), res.selected, expect[k], res.selected_total);
    ++k;
  }
  return o;
}

// 10
Outcome tableau_orders() {
  Outcome o;
  for (const auto& t : tableau_catalog()) {
    const double rate = support::probe_order(t);
    const int p = t.declared_order;
    o.check(rate >= p - 0.2 && rate <= p + 0.3, "%s: %.3f in [%.1f, %.1f]", t.name.c_str(), rate, p - 0.2, p + 0.3);
  }
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* title;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {"exact-solve equivalence with ExpRK", exact_solve},
      {"phi-function identities", phi_suite},
      {"bi-directional convergence", bi_directional},
      {"one-directional convergence", one_directional},
      {"inner-order table", inner_order_table},
      {"fast-duration identities", fast_duration},
      {"slow-call counts", slow_calls},
      {"category-I stiff runs", category_i_runs},
      {"m-sweep selection", msweep},
      {"inner tableau order probes", tableau_orders},
  };
  int failures = 0;
  int index = 0;
  for (const auto& c : criteria) {
    ++index;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.check(false, "exception: %s", e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s  %2d  %-38s (%.1f s)\n", out.passed ? "PASS" : "FAIL", index, c.title, secs);
    for (const auto& d : out.details) std::printf("          %s\n", d.c_str());
    std::fflush(stdout);
    if (!out.passed) ++failures;
  }
  std::printf("%d of %d criteria passed\n", index - failures, index);
  return failures == 0 ? 0 : 1;
}
