#include "merk/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <thread>

#include "merk/errors.hpp"
#include "merk/mis.hpp"

namespace merk::harness {

using problems::ProblemId;

std::string_view to_string(Method m) {
  switch (m) {
    case Method::kMERK2: return "MERK2";
    case Method::kMERK3: return "MERK3";
    case Method::kMERK4: return "MERK4";
    case Method::kMERK5: return "MERK5";
    case Method::kMisKW3: return "MIS-KW3";
  }
  return "unknown";
}

const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods = {Method::kMERK2, Method::kMERK3, Method::kMERK4,
                                              Method::kMERK5, Method::kMisKW3};
  return methods;
}

Method parse_method(std::string_view name) {
  for (Method m : all_methods()) {
    if (to_string(m) == name) return m;
  }
  throw ContractViolation("unknown method '" + std::string(name) + "'");
}

int nominal_order(Method m) {
  switch (m) {
    case Method::kMERK2: return 2;
    case Method::kMERK3: return 3;
    case Method::kMERK4: return 4;
    case Method::kMERK5: return 5;
    case Method::kMisKW3: return 3;
  }
  return 0;
}

std::string_view to_string(ErrorMetric m) {
  return m == ErrorMetric::kAllSteps ? "all_steps" : "final_time";
}

ErrorMetric parse_error_metric(std::string_view name) {
  if (name == "all_steps") return ErrorMetric::kAllSteps;
  if (name == "final_time") return ErrorMetric::kFinalTime;
  throw ContractViolation("unknown error metric '" + std::string(name) + "'");
}

namespace {

MerkName merk_name(Method m) {
  switch (m) {
    case Method::kMERK2: return MerkName::kMERK2;
    case Method::kMERK3: return MerkName::kMERK3;
    case Method::kMERK4: return MerkName::kMERK4;
    case Method::kMERK5: return MerkName::kMERK5;
    case Method::kMisKW3: break;
  }
  throw ContractViolation("MIS-KW3 is not a MERK scheme");
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Runs task(i) for i in [0, n) on up to `jobs` threads.
template <typename Task>
void parallel_for(std::size_t n, int jobs, Task&& task) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          task(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

StepPolicy StepPolicy::fixed_h(double h) {
  if (!(h > 0.0)) throw ContractViolation("fixed_h needs h > 0");
  return {Kind::kFixedH, h};
}

StepPolicy StepPolicy::fixed_m(int m) {
  if (m < 1) throw ContractViolation("fixed_m needs m >= 1");
  return {Kind::kFixedM, static_cast<double>(m)};
}

StepPolicy StepPolicy::parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw ContractViolation("policy must look like fixed_h:VAL or fixed_m:VAL");
  }
  const std::string kind(text.substr(0, colon));
  const std::string value(text.substr(colon + 1));
  try {
    std::size_t used = 0;
    if (kind == "fixed_h") {
      const double h = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
      return fixed_h(h);
    }
    if (kind == "fixed_m") {
      const int m = std::stoi(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
      return fixed_m(m);
    }
  } catch (const std::logic_error&) {
    throw ContractViolation("bad policy value '" + value + "'");
  }
  throw ContractViolation("unknown policy kind '" + kind + "'");
}

double StepPolicy::micro_step(double macro_step) const {
  return kind == Kind::kFixedH ? value : macro_step / value;
}

std::string StepPolicy::kind_name() const {
  return kind == Kind::kFixedH ? "fixed_h" : "fixed_m";
}

std::string StepPolicy::to_string() const {
  if (kind == Kind::kFixedM) return "fixed_m:" + std::to_string(static_cast<int>(value));
  return "fixed_h:" + format_double(value);
}

int StudyConfig::stage_order() const {
  if (method == Method::kMisKW3) return 3;
  return q > 0 ? q : nominal_order(method);
}

int StudyConfig::final_order() const {
  if (method == Method::kMisKW3) return 3;
  return r > 0 ? r : nominal_order(method);
}

double StudyConfig::effective_floor_cutoff() const {
  if (floor_cutoff) return *floor_cutoff;
  return problems::spec_of(problem).reference == problems::ReferenceKind::kFineRk ? 1e-11 : 1e-13;
}

void StudyConfig::validate() const {
  if (macro_steps.size() < 4) {
    throw ContractViolation("a convergence study needs at least 4 macro steps");
  }
  const auto& spec = problems::spec_of(problem);
  if (spec.category == problems::Category::kI && policy.kind != StepPolicy::Kind::kFixedH) {
    throw ContractViolation(std::string(spec.name) + " is a category-I problem: use fixed_h");
  }
  if (spec.category == problems::Category::kII && policy.kind != StepPolicy::Kind::kFixedM) {
    throw ContractViolation(std::string(spec.name) + " is a category-II problem: use fixed_m");
  }
  if (!(policy.value > 0.0)) throw ContractViolation("policy value must be positive");
  if (method != Method::kMisKW3) {
    (void)tableau_of_order(stage_order());
    (void)tableau_of_order(final_order());
  }
  const auto problem_instance = problems::make_problem(problem);
  const double smallest = *std::min_element(macro_steps.begin(), macro_steps.end());
  for (double h_macro : macro_steps) {
    (void)macro_step_count(problem_instance.t0(), problem_instance.t_end(), h_macro);
    const double ratio = h_macro / smallest;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio) {
      throw ContractViolation("every H must be a multiple of the smallest H");
    }
  }
  if (jobs < 1) throw ContractViolation("jobs must be >= 1");
}

double max_abs_error(const Trajectory& trajectory, const std::vector<State>& reference) {
  if (trajectory.size() != reference.size()) {
    throw ContractViolation("trajectory and reference lengths differ");
  }
  double err = 0.0;
  for (std::size_t n = 1; n < trajectory.size(); ++n) {
    if (trajectory[n].u.size() != reference[n].size()) {
      throw ContractViolation("trajectory and reference dimensions differ");
    }
    err = std::max(err, (trajectory[n].u - reference[n]).cwiseAbs().maxCoeff());
  }
  return err;
}

double final_abs_error(const Trajectory& trajectory, const std::vector<State>& reference) {
  if (trajectory.size() != reference.size() || trajectory.empty()) {
    throw ContractViolation("trajectory and reference lengths differ");
  }
  if (trajectory.back().u.size() != reference.back().size()) {
    throw ContractViolation("trajectory and reference dimensions differ");
  }
  return (trajectory.back().u - reference.back()).cwiseAbs().maxCoeff();
}

double fit_rate(const std::vector<double>& macro_steps, const std::vector<double>& errors,
                double floor_cutoff) {
  if (macro_steps.size() != errors.size()) throw ContractViolation("fit_rate: size mismatch");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (errors[i] > floor_cutoff && std::isfinite(errors[i])) {
      xs.push_back(std::log(macro_steps[i]));
      ys.push_back(std::log(errors[i]));
    }
  }
  if (xs.size() < 2) {
    throw InsufficientData("fit_rate needs at least 2 errors above " + format_double(floor_cutoff));
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  if (sxx == 0.0) throw InsufficientData("fit_rate needs distinct macro steps");
  return sxy / sxx;
}

double fit_rate(const std::vector<ConvergenceRow>& rows, double floor_cutoff) {
  std::vector<double> hs, errs;
  for (const auto& r : rows) {
    hs.push_back(r.macro_step);
    errs.push_back(r.max_error);
  }
  return fit_rate(hs, errs, floor_cutoff);
}

problems::ReferenceSolution study_reference(const StudyConfig& config) {
  const double spacing = *std::min_element(config.macro_steps.begin(), config.macro_steps.end());
  double smallest_h = std::numeric_limits<double>::infinity();
  for (double h_macro : config.macro_steps) {
    smallest_h = std::min(smallest_h, config.policy.micro_step(h_macro));
  }
  return problems::make_reference(config.problem, spacing, smallest_h / 20.0, config.cache_dir);
}

ConvergenceRow run_single(const StudyConfig& config, double macro_step,
                          const problems::ReferenceSolution& reference) {
  const SplitOdeProblem problem = problems::make_problem(config.problem);
  problem.counters_reset();
  const double h = config.policy.micro_step(macro_step);
  Trajectory traj;
  try {
    if (config.method == Method::kMisKW3) {
      static const MisScheme mis = make_mis_kw3();
      traj = mis_integrate(mis, problem, make_erk_solver(mis.inner, h), macro_step);
    } else {
      const MerkScheme scheme = make_merk(merk_name(config.method));
      traj = merk_integrate(scheme, problem, make_erk_solver(tableau_of_order(config.stage_order()), h),
                            make_erk_solver(tableau_of_order(config.final_order()), h), macro_step);
    }
  } catch (const ContractViolation&) {
    throw;
  } catch (const Error& e) {
    throw RunFailed(std::string(to_string(config.method)) + " on " +
                    std::string(problems::to_string(config.problem)) +
                    " with H=" + format_double(macro_step) + ": " + e.what());
  }
  std::vector<State> ref;
  ref.reserve(traj.size());
  for (const auto& p : traj) ref.push_back(reference.at(p.t));

  const EvalCounters counters = problem.counters_snapshot();
  ConvergenceRow row;
  row.macro_step = macro_step;
  row.micro_step = h;
  row.m = macro_step / h;
  row.max_error = config.metric == ErrorMetric::kAllSteps ? max_abs_error(traj, ref)
                                                         : final_abs_error(traj, ref);
  row.slow_calls = counters.slow_calls;
  row.fast_calls = counters.fast_calls;
  row.fast_duration = counters.fast_duration;
  return row;
}

ConvergenceReport run_convergence(const StudyConfig& config) {
  config.validate();
  const problems::ReferenceSolution reference = study_reference(config);
  ConvergenceReport report;
  report.config = config;
  report.rows.resize(config.macro_steps.size());
  parallel_for(config.macro_steps.size(), config.jobs, [&](std::size_t i) {
    report.rows[i] = run_single(config, config.macro_steps[i], reference);
  });
  std::sort(report.rows.begin(), report.rows.end(),
            [](const auto& a, const auto& b) { return a.macro_step > b.macro_step; });
  report.floor_cutoff = config.effective_floor_cutoff();
  report.best_fit_rate = fit_rate(report.rows, report.floor_cutoff);
  return report;
}

void write_csv(const ConvergenceReport& report, std::ostream& out) {
  const auto& c = report.config;
  out << "method,problem,policy,H,h,m,q,r,max_error,slow_calls,fast_calls,total_calls\n";
  for (const auto& row : report.rows) {
    out << to_string(c.method) << ',' << problems::to_string(c.problem) << ','
        << c.policy.kind_name() << ',' << format_double(row.macro_step) << ','
        << format_double(row.micro_step) << ',' << format_double(row.m) << ','
        << c.stage_order() << ',' << c.final_order() << ',' << format_double(row.max_error)
        << ',' << row.slow_calls << ',' << row.fast_calls << ',' << row.total_calls() << '\n';
  }
}

void write_sidecar(const ConvergenceReport& report, std::ostream& out) {
  const auto& c = report.config;
  out << "best_fit_rate " << format_double(report.best_fit_rate) << '\n'
      << "floor_cutoff " << format_double(report.floor_cutoff) << '\n'
      << "method " << to_string(c.method) << '\n'
      << "problem " << problems::to_string(c.problem) << '\n'
      << "policy " << c.policy.to_string() << '\n'
      << "metric " << to_string(c.metric) << '\n'
      << "q " << c.stage_order() << '\n'
      << "r " << c.final_order() << '\n'
      << "H";
  for (double h_macro : c.macro_steps) out << ' ' << format_double(h_macro);
  out << '\n';
}

void save_report(const ConvergenceReport& report, const std::filesystem::path& path) {
  std::ofstream csv(path);
  if (!csv) throw ContractViolation("cannot write " + path.string());
  write_csv(report, csv);
  std::ofstream side(path.string() + ".txt");
  if (!side) throw ContractViolation("cannot write " + path.string() + ".txt");
  write_sidecar(report, side);
}

namespace {

std::vector<double> geometric(double start, int count) {
  std::vector<double> out;
  for (int k = 0; k < count; ++k) out.push_back(start / std::ldexp(1.0, k));
  return out;
}

}  // namespace

std::vector<double> default_macro_steps(ProblemId id, Method /*method*/) {
  switch (id) {
    case ProblemId::kReactionDiffusion: return geometric(0.6, 5);
    case ProblemId::kBrusselator: return geometric(0.1, 5);
    case ProblemId::kOneDirectional: return geometric(0.1, 6);
    case ProblemId::kBiDirectional: return geometric(0.02, 6);
  }
  return {};
}

int default_m(ProblemId id, Method method) {
  if (id == ProblemId::kBiDirectional) {
    switch (method) {
      case Method::kMERK5: return 10;
      case Method::kMisKW3: return 25;
      default: return 50;
    }
  }
  switch (method) {
    case Method::kMERK4: return 50;
    case Method::kMERK5: return 25;
    default: return 75;
  }
}

std::vector<InnerOrderEntry> inner_order_table(Method method) {
  switch (method) {
    case Method::kMERK3:
      return {{2, 2, 0, 2.00}, {3, 2, 0, 2.00}, {2, 3, 0, 3.03}, {3, 3, 0, 3.03}, {4, 4, 0, 3.03}};
    case Method::kMERK4:
      return {{3, 3, 0, 3.01}, {4, 3, 0, 3.01}, {3, 4, 0, 3.99}, {4, 4, 0, 3.99}, {5, 5, 0, 3.99}};
    case Method::kMERK5:
      return {{4, 4, 0, 4.00}, {5, 4, 0, 4.00}, {4, 5, 0, 4.97}, {5, 5, 0, 4.97}, {6, 6, 0, 4.96}};
    default: break;
  }
  throw ContractViolation("the inner-order study covers MERK3, MERK4 and MERK5 only");
}

std::vector<InnerOrderEntry> run_inner_order_study(Method method, int jobs) {
  auto table = inner_order_table(method);
  for (auto& entry : table) {
    StudyConfig cfg;
    cfg.method = method;
    cfg.problem = ProblemId::kBiDirectional;
    cfg.policy = StepPolicy::fixed_m(default_m(cfg.problem, method));
    cfg.macro_steps = default_macro_steps(cfg.problem, method);
    cfg.q = entry.q;
    cfg.r = entry.r;
    cfg.jobs = jobs;
    entry.observed = run_convergence(cfg).best_fit_rate;
  }
  return table;
}

std::vector<int> default_m_list() { return {5, 10, 25, 50, 75, 85, 100, 125}; }

namespace {

double clamp_err(double e, double floor) { return std::max(e, floor); }

}  // namespace

int select_m_slow_only(const std::vector<int>& m_values,
                       const std::vector<ConvergenceReport>& reports, double factor, double floor) {
  if (m_values.empty() || m_values.size() != reports.size()) {
    throw ContractViolation("m-sweep needs one report per m");
  }
  const std::size_t rows = reports.front().rows.size();
  for (const auto& r : reports) {
    if (r.rows.size() != rows) throw ContractViolation("m-sweep reports must share the H grid");
  }
  std::vector<double> best(rows, std::numeric_limits<double>::infinity());
  for (const auto& rep : reports) {
    for (std::size_t i = 0; i < rows; ++i) {
      best[i] = std::min(best[i], clamp_err(rep.rows[i].max_error, floor));
    }
  }
  int chosen = 0;
  bool found = false;
  for (std::size_t k = 0; k < reports.size(); ++k) {
    bool efficient = true;
    for (std::size_t i = 0; i < rows && efficient; ++i) {
      efficient = clamp_err(reports[k].rows[i].max_error, floor) <= factor * best[i];
    }
    if (efficient && (!found || m_values[k] < chosen)) {
      chosen = m_values[k];
      found = true;
    }
  }
  return chosen;
}

int select_m_total(const std::vector<int>& m_values, const std::vector<ConvergenceReport>& reports,
                   double factor, double floor) {
  if (m_values.empty() || m_values.size() != reports.size()) {
    throw ContractViolation("m-sweep needs one report per m");
  }
  struct Curve {
    std::vector<double> x, y;  // log cost ascending, log error
  };
  std::vector<Curve> curves;
  for (const auto& rep : reports) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& row : rep.rows) {
      pts.emplace_back(std::log(static_cast<double>(row.total_calls())),
                       std::log(clamp_err(row.max_error, floor)));
    }
    std::sort(pts.begin(), pts.end());
    Curve c;
    for (const auto& [x, y] : pts) {
      c.x.push_back(x);
      c.y.push_back(y);
    }
    curves.push_back(std::move(c));
  }
  auto interp = [](const Curve& c, double x) -> std::optional<double> {
    if (x < c.x.front() || x > c.x.back()) return std::nullopt;
    for (std::size_t i = 0; i + 1 < c.x.size(); ++i) {
      if (x <= c.x[i + 1]) {
        const double w = c.x[i + 1] == c.x[i] ? 0.0 : (x - c.x[i]) / (c.x[i + 1] - c.x[i]);
        return c.y[i] + w * (c.y[i + 1] - c.y[i]);
      }
    }
    return c.y.back();
  };
  const double log_factor = std::log(factor);
  int chosen = 0;
  bool found = false;
  for (std::size_t k = 0; k < curves.size(); ++k) {
    bool efficient = true;
    for (std::size_t i = 0; i < curves[k].x.size() && efficient; ++i) {
      double envelope = curves[k].y[i];
      for (const auto& other : curves) {
        if (auto y = interp(other, curves[k].x[i])) envelope = std::min(envelope, *y);
      }
      efficient = curves[k].y[i] <= envelope + log_factor;
    }
    if (efficient && (!found || m_values[k] > chosen)) {
      chosen = m_values[k];
      found = true;
    }
  }
  return chosen;
}

MSweepResult run_msweep(Method method, ProblemId problem, const std::vector<int>& m_values,
                        const std::vector<double>& macro_steps, int jobs) {
  if (problems::spec_of(problem).category != problems::Category::kII) {
    throw ContractViolation("the m-sweep applies to category-II problems only");
  }
  if (m_values.empty()) throw ContractViolation("m-sweep needs at least one m");
  MSweepResult result;
  result.m_values = m_values;
  result.reports.resize(m_values.size());
  parallel_for(m_values.size(), jobs, [&](std::size_t k) {
    StudyConfig cfg;
    cfg.method = method;
    cfg.problem = problem;
    cfg.policy = StepPolicy::fixed_m(m_values[k]);
    cfg.macro_steps = macro_steps;
    result.reports[k] = run_convergence(cfg);
  });
  const double floor = result.reports.front().floor_cutoff;
  result.selected_slow = select_m_slow_only(m_values, result.reports, 1.5, floor);
  result.selected_total = select_m_total(m_values, result.reports, 1.5, floor);
  result.plots_disagree = result.selected_slow != result.selected_total;
  result.selected = result.selected_slow;
  return result;
}

}  // namespace merk::harness
