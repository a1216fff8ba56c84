#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "merk/errors.hpp"
#include "merk/harness.hpp"
#include "merk/oracle_checks.hpp"
#include "merk/tableau.hpp"

namespace {

using namespace merk;
using harness::Method;
using problems::ProblemId;

constexpr int kExitSolver = 1;
constexpr int kExitConfig = 2;

struct StudyFlags {
  std::string method = "MERK3";
  std::string problem = "bi_directional";
  std::string policy;
  std::vector<double> h_list;
  int q = 0;
  int r = 0;
  std::string out;
  double floor = 0.0;
  std::string metric = "all_steps";
};

void add_study_flags(CLI::App* cmd, StudyFlags& f) {
  cmd->add_option("--method", f.method, "MERK2, MERK3, MERK4, MERK5 or MIS-KW3")->required();
  cmd->add_option("--problem", f.problem, "problem id (see `merk list`)")->required();
  cmd->add_option("--policy", f.policy, "fixed_h:VAL or fixed_m:VAL (default depends on the problem)");
  cmd->add_option("--h-list", f.h_list, "macro steps H (default grid if omitted)");
  cmd->add_option("--q", f.q, "stage inner order");
  cmd->add_option("--r", f.r, "final inner order");
  cmd->add_option("--out", f.out, "CSV path; a .txt sidecar is written next to it");
  cmd->add_option("--floor", f.floor, "error floor for the rate fit");
  cmd->add_option("--metric", f.metric, "all_steps (default) or final_time");
}

harness::StudyConfig make_config(const StudyFlags& f, int jobs) {
  harness::StudyConfig cfg;
  cfg.method = harness::parse_method(f.method);
  cfg.problem = problems::parse_problem_id(f.problem);
  if (!f.policy.empty()) {
    cfg.policy = harness::StepPolicy::parse(f.policy);
  } else if (problems::spec_of(cfg.problem).category == problems::Category::kI) {
    cfg.policy = harness::StepPolicy::fixed_h(1e-3);
  } else {
    cfg.policy = harness::StepPolicy::fixed_m(harness::default_m(cfg.problem, cfg.method));
  }
  cfg.macro_steps = f.h_list.empty() ? harness::default_macro_steps(cfg.problem, cfg.method) : f.h_list;
  cfg.q = f.q;
  cfg.r = f.r;
  if (f.floor > 0.0) cfg.floor_cutoff = f.floor;
  cfg.metric = harness::parse_error_metric(f.metric);
  cfg.jobs = jobs;
  return cfg;
}

void print_rows(const harness::ConvergenceReport& report, bool efficiency) {
  if (efficiency) {
    std::printf("%-12s %-12s %-10s %-12s %-12s\n", "H", "max_error", "slow", "fast", "total");
  } else {
    std::printf("%-12s %-12s %-8s %-12s\n", "H", "max_error", "m", "slow");
  }
  for (const auto& row : report.rows) {
    if (efficiency) {
      std::printf("%-12.5g %-12.4e %-10llu %-12llu %-12llu\n", row.macro_step, row.max_error,
                  static_cast<unsigned long long>(row.slow_calls),
                  static_cast<unsigned long long>(row.fast_calls),
                  static_cast<unsigned long long>(row.total_calls()));
    } else {
      std::printf("%-12.5g %-12.4e %-8.4g %-12llu\n", row.macro_step, row.max_error, row.m,
                  static_cast<unsigned long long>(row.slow_calls));
    }
  }
  std::printf("rate %.3f (floor %.0e)\n", report.best_fit_rate, report.floor_cutoff);
}

int run_study(const StudyFlags& f, int jobs, bool efficiency) {
  const auto cfg = make_config(f, jobs);
  const auto report = harness::run_convergence(cfg);
  std::printf("%s on %s, %s, q=%d r=%d\n", std::string(harness::to_string(cfg.method)).c_str(),
              std::string(problems::to_string(cfg.problem)).c_str(), cfg.policy.to_string().c_str(),
              cfg.stage_order(), cfg.final_order());
  print_rows(report, efficiency);
  if (!f.out.empty()) harness::save_report(report, f.out);
  return 0;
}

int run_msweep(const std::string& method_name, const std::string& problem_name,
               std::vector<int> m_list, std::vector<double> h_list, const std::string& out, int jobs) {
  const Method method = harness::parse_method(method_name);
  const ProblemId problem = problems::parse_problem_id(problem_name);
  if (m_list.empty()) m_list = harness::default_m_list();
  if (h_list.empty()) h_list = harness::default_macro_steps(problem, method);
  const auto result = harness::run_msweep(method, problem, m_list, h_list, jobs);
  std::printf("%-6s %-10s %-14s %-14s\n", "m", "rate", "err(H_max)", "err(H_min)");
  for (std::size_t k = 0; k < m_list.size(); ++k) {
    const auto& rep = result.reports[k];
    std::printf("%-6d %-10.3f %-14.4e %-14.4e\n", m_list[k], rep.best_fit_rate,
                rep.rows.front().max_error, rep.rows.back().max_error);
    if (!out.empty()) harness::save_report(rep, out + "_m" + std::to_string(m_list[k]) + ".csv");
  }
  std::printf("selected m (slow-only plot): %d\n", result.selected_slow);
  std::printf("selected m (total-calls plot): %d\n", result.selected_total);
  if (result.plots_disagree) {
    std::printf("plots disagree; using the slow-only choice\n");
  }
  std::printf("selected m: %d\n", result.selected);
  return 0;
}

int run_inner_order(const std::string& method_name, int jobs) {
  const Method method = harness::parse_method(method_name);
  const auto table = harness::run_inner_order_study(method, jobs);
  std::printf("%s on bi_directional\n%-4s %-4s %-10s %-10s\n",
              std::string(harness::to_string(method)).c_str(), "q", "r", "observed", "expected");
  for (const auto& e : table) {
    std::printf("%-4d %-4d %-10.2f %-10.2f\n", e.q, e.r, e.observed, e.expected);
  }
  return 0;
}

int run_oracle_check() {
  bool ok = true;
  for (const auto& c : oracle::run_oracle_checks()) {
    std::printf("%s  %-44s %.3e (tol %.0e)\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.value,
                c.tolerance);
    ok = ok && c.passed;
  }
  return ok ? 0 : kExitSolver;
}

int run_list() {
  std::printf("methods:\n");
  for (Method m : harness::all_methods()) {
    std::printf("  %-8s order %d\n", std::string(harness::to_string(m)).c_str(), harness::nominal_order(m));
  }
  std::printf("problems:\n");
  for (const auto& p : problems::problem_catalog()) {
    std::printf("  %-18s category %s\n", std::string(p.name).c_str(),
                p.category == problems::Category::kI ? "I" : "II");
  }
  std::printf("tableaus:\n");
  for (const auto& t : tableau_catalog()) {
    std::printf("  %-10s order %d, %zu stages\n", t.name.c_str(), t.declared_order, t.stages());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multirate exponential Runge-Kutta experiments"};
  app.require_subcommand(1);
  int jobs = 1;
  app.add_option("--jobs", jobs, "worker threads for independent runs")->check(CLI::PositiveNumber);

  StudyFlags converge_flags, efficiency_flags;
  auto* converge = app.add_subcommand("converge", "convergence study, CSV output");
  add_study_flags(converge, converge_flags);
  auto* efficiency = app.add_subcommand("efficiency", "convergence study with call counts");
  add_study_flags(efficiency, efficiency_flags);

  std::string sweep_method, sweep_problem = "one_directional", sweep_out;
  std::vector<int> m_list;
  std::vector<double> sweep_h;
  auto* msweep = app.add_subcommand("msweep", "sweep the separation factor m");
  msweep->add_option("--method", sweep_method)->required();
  msweep->add_option("--problem", sweep_problem);
  msweep->add_option("--m-list", m_list);
  msweep->add_option("--h-list", sweep_h);
  msweep->add_option("--out", sweep_out, "CSV prefix; one file per m");

  std::string inner_method;
  auto* inner = app.add_subcommand("inner-order-study", "observed order for each inner (q, r)");
  inner->add_option("--method", inner_method)->required();

  auto* oracle_check = app.add_subcommand("oracle-check", "exact-solve equivalence and phi identities");
  auto* list = app.add_subcommand("list", "methods, problems and tableaus");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*converge) return run_study(converge_flags, jobs, false);
    if (*efficiency) return run_study(efficiency_flags, jobs, true);
    if (*msweep) return run_msweep(sweep_method, sweep_problem, m_list, sweep_h, sweep_out, jobs);
    if (*inner) return run_inner_order(inner_method, jobs);
    if (*oracle_check) return run_oracle_check();
    if (*list) return run_list();
  } catch (const ContractViolation& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitSolver;
  }
  return kExitConfig;
}
