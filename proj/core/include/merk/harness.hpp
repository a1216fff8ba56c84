#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "merk/merk.hpp"
#include "merk/problems.hpp"

namespace merk::harness {

enum class Method { kMERK2, kMERK3, kMERK4, kMERK5, kMisKW3 };

std::string_view to_string(Method m);
Method parse_method(std::string_view name);
const std::vector<Method>& all_methods();
int nominal_order(Method m);

struct StepPolicy {
  enum class Kind { kFixedH, kFixedM };
  Kind kind = Kind::kFixedM;
  double value = 0.0;

  static StepPolicy fixed_h(double h);
  static StepPolicy fixed_m(int m);
  /// "fixed_h:1e-3" or "fixed_m:50".
  static StepPolicy parse(std::string_view text);

  double micro_step(double macro_step) const;
  std::string kind_name() const;
  std::string to_string() const;
};

/// Error over every macro point (default) or at t_end only.
enum class ErrorMetric { kAllSteps, kFinalTime };

std::string_view to_string(ErrorMetric m);
ErrorMetric parse_error_metric(std::string_view name);

struct StudyConfig {
  Method method = Method::kMERK3;
  problems::ProblemId problem = problems::ProblemId::kBiDirectional;
  StepPolicy policy;
  std::vector<double> macro_steps;
  int q = 0;  ///< stage inner order; 0 selects the method's order
  int r = 0;  ///< final inner order; 0 selects the method's order
  std::optional<double> floor_cutoff;
  ErrorMetric metric = ErrorMetric::kAllSteps;
  int jobs = 1;
  /// Fine-reference cache; defaults to problems::default_cache_dir().
  std::optional<std::filesystem::path> cache_dir = problems::default_cache_dir();

  int stage_order() const;
  int final_order() const;
  double effective_floor_cutoff() const;
  /// Throws ContractViolation on an invalid study.
  void validate() const;
};

struct ConvergenceRow {
  double macro_step = 0.0;
  double micro_step = 0.0;
  double m = 0.0;
  double max_error = 0.0;
  std::uint64_t slow_calls = 0;
  std::uint64_t fast_calls = 0;
  Rational fast_duration{0};

  std::uint64_t total_calls() const { return slow_calls + fast_calls; }
};

struct ConvergenceReport {
  StudyConfig config;
  std::vector<ConvergenceRow> rows;  ///< sorted by descending H
  double best_fit_rate = 0.0;
  double floor_cutoff = 0.0;
};

/// max over steps n >= 1 and components of |u_n - reference_n|.
double max_abs_error(const Trajectory& trajectory, const std::vector<State>& reference);
/// max over components of |u_N - reference_N| at the last point.
double final_abs_error(const Trajectory& trajectory, const std::vector<State>& reference);

/// Least-squares slope of log(error) against log(H) over rows whose error
/// exceeds `floor_cutoff`. Throws InsufficientData with fewer than 2 rows.
double fit_rate(const std::vector<ConvergenceRow>& rows, double floor_cutoff = 1e-13);
double fit_rate(const std::vector<double>& macro_steps, const std::vector<double>& errors,
                double floor_cutoff = 1e-13);

/// Builds the reference used by a study (grid spacing = smallest H,
/// fine-RK step = smallest micro step / 20).
problems::ReferenceSolution study_reference(const StudyConfig& config);

/// One integration at macro step H with fresh counters.
ConvergenceRow run_single(const StudyConfig& config, double macro_step,
                          const problems::ReferenceSolution& reference);

ConvergenceReport run_convergence(const StudyConfig& config);

/// Column order: method,problem,policy,H,h,m,q,r,max_error,slow_calls,
/// fast_calls,total_calls.
void write_csv(const ConvergenceReport& report, std::ostream& out);
void write_sidecar(const ConvergenceReport& report, std::ostream& out);
/// Writes `path` (CSV) and `path` + ".txt" (rate and config echo).
void save_report(const ConvergenceReport& report, const std::filesystem::path& path);

/// Default geometric H grid for a problem (ratio 2).
std::vector<double> default_macro_steps(problems::ProblemId id, Method method);
/// Separation factors used for the bi- and one-directional problems.
int default_m(problems::ProblemId id, Method method);

struct InnerOrderEntry {
  int q = 0;
  int r = 0;
  double observed = 0.0;
  double expected = 0.0;
};

/// The five (q, r) combinations tabulated for a MERK method, with the
/// expected observed orders.
std::vector<InnerOrderEntry> inner_order_table(Method method);

/// Runs every (q, r) of inner_order_table on the bi-directional problem.
std::vector<InnerOrderEntry> run_inner_order_study(Method method, int jobs = 1);

struct MSweepResult {
  std::vector<int> m_values;
  std::vector<ConvergenceReport> reports;  ///< parallel to m_values
  int selected_slow = 0;
  int selected_total = 0;
  int selected = 0;
  bool plots_disagree = false;
};

/// Efficient group of the slow-only plot: every m whose error at every H is
/// within `factor` of the best error at that H (errors clamped at `floor`).
/// Returns the smallest such m.
int select_m_slow_only(const std::vector<int>& m_values,
                       const std::vector<ConvergenceReport>& reports, double factor = 1.5,
                       double floor = 1e-13);

/// Efficient group of the total-calls plot: every m whose points lie within
/// `factor` of the lower envelope of all curves (log-log interpolation).
/// Returns the largest such m.
int select_m_total(const std::vector<int>& m_values, const std::vector<ConvergenceReport>& reports,
                   double factor = 1.5, double floor = 1e-13);

MSweepResult run_msweep(Method method, problems::ProblemId problem, const std::vector<int>& m_values,
                        const std::vector<double>& macro_steps, int jobs = 1);

std::vector<int> default_m_list();

}  // namespace merk::harness
