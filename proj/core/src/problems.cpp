#include "merk/problems.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "merk/errors.hpp"
#include "merk/merk.hpp"
#include "merk/phi.hpp"
#include "merk/tableau.hpp"

namespace merk::problems {

const std::vector<ProblemSpec>& problem_catalog() {
  static const std::vector<ProblemSpec> catalog = {
      {ProblemId::kReactionDiffusion, "reaction_diffusion", Category::kI, ReferenceKind::kFineRk},
      {ProblemId::kBrusselator, "brusselator", Category::kI, ReferenceKind::kFineRk},
      {ProblemId::kOneDirectional, "one_directional", Category::kII, ReferenceKind::kAnalytic},
      {ProblemId::kBiDirectional, "bi_directional", Category::kII, ReferenceKind::kExpmExact},
  };
  return catalog;
}

const ProblemSpec& spec_of(ProblemId id) {
  for (const auto& s : problem_catalog()) {
    if (s.id == id) return s;
  }
  throw ContractViolation("unknown problem id");
}

ProblemId parse_problem_id(std::string_view name) {
  for (const auto& s : problem_catalog()) {
    if (s.name == name) return s.id;
  }
  throw ContractViolation("unknown problem '" + std::string(name) + "'");
}

std::string_view to_string(ProblemId id) { return spec_of(id).name; }

double reaction_diffusion_initial(double x) {
  const double lambda = 5.0 * std::sqrt(2.0);
  return 1.0 / (1.0 + std::exp(lambda * (x - 1.0)));
}

SplitOdeProblem make_reaction_diffusion(int n_points) {
  if (n_points < 3) throw ContractViolation("reaction-diffusion needs at least 3 points");
  const double length = 5.0;
  const double dx = length / (n_points - 1);
  const double coef = 1.0 / (100.0 * dx * dx);
  const Eigen::Index n = n_points;

  auto linear = [n, coef](const State& u, State& out) {
    // Ghost-point reflection at both ends.
    out[0] = coef * (2.0 * u[1] - 2.0 * u[0]);
    for (Eigen::Index i = 1; i + 1 < n; ++i) {
      out[i] = coef * (u[i - 1] - 2.0 * u[i] + u[i + 1]);
    }
    out[n - 1] = coef * (2.0 * u[n - 2] - 2.0 * u[n - 1]);
  };
  auto nonlinear = [](double, const State& u, State& out) {
    out = u.array().square() * (1.0 - u.array());
  };
  State u0(n);
  for (Eigen::Index i = 0; i < n; ++i) u0[i] = reaction_diffusion_initial(i * dx);

  std::optional<DenseMatrix> dense;
  if (n <= oracle::kMaxOracleDimension) {
    DenseMatrix l = DenseMatrix::Zero(n, n);
    l(0, 0) = -2.0 * coef;
    l(0, 1) = 2.0 * coef;
    for (Eigen::Index i = 1; i + 1 < n; ++i) {
      l(i, i - 1) = coef;
      l(i, i) = -2.0 * coef;
      l(i, i + 1) = coef;
    }
    l(n - 1, n - 2) = 2.0 * coef;
    l(n - 1, n - 1) = -2.0 * coef;
    dense = std::move(l);
  }
  return SplitOdeProblem("reaction_diffusion", n, linear, nonlinear, 0.0, 3.0, std::move(u0),
                         std::move(dense));
}

SplitOdeProblem make_brusselator() {
  constexpr double a = 1.0, b = 3.5, inv_eps = 100.0;
  auto linear = [](const State& u, State& out) {
    out[0] = 0.0;
    out[1] = 0.0;
    out[2] = -inv_eps * u[2];
  };
  auto nonlinear = [](double, const State& y, State& out) {
    const double u = y[0], v = y[1], w = y[2];
    out[0] = a - (w + 1.0) * u + u * u * v;
    out[1] = w * u - u * u * v;
    out[2] = b * inv_eps - u * w;
  };
  DenseMatrix l = DenseMatrix::Zero(3, 3);
  l(2, 2) = -inv_eps;
  return SplitOdeProblem("brusselator", 3, linear, nonlinear, 0.0, 2.0,
                         State{{1.2, 3.1, 3.0}}, std::move(l));
}

SplitOdeProblem make_one_directional() {
  DenseMatrix l{{0.0, -50.0, 0.0}, {50.0, 0.0, 0.0}, {1.0, 1.0, 0.0}};
  auto linear = [l](const State& u, State& out) { out.noalias() = l * u; };
  auto nonlinear = [](double, const State& u, State& out) {
    out[0] = 0.0;
    out[1] = 0.0;
    out[2] = -u[2];
  };
  return SplitOdeProblem("one_directional", 3, linear, nonlinear, 0.0, 1.0,
                         State{{1.0, 0.0, 2.0}}, std::move(l));
}

State analytic_solution_one_directional(double t) {
  return State{{std::cos(50.0 * t), std::sin(50.0 * t),
                5051.0 / 2501.0 * std::exp(-t) - 49.0 / 2501.0 * std::cos(50.0 * t) +
                    51.0 / 2501.0 * std::sin(50.0 * t)}};
}

DenseMatrix bi_directional_full_matrix() {
  return DenseMatrix{{0.0, 100.0, 1.0}, {-100.0, 0.0, 0.0}, {1.0, 0.0, -1.0}};
}

SplitOdeProblem make_bi_directional() {
  DenseMatrix l{{0.0, 100.0, 0.0}, {-100.0, 0.0, 0.0}, {1.0, 0.0, 0.0}};
  auto linear = [l](const State& u, State& out) { out.noalias() = l * u; };
  auto nonlinear = [](double, const State& u, State& out) {
    out[0] = u[2];
    out[1] = 0.0;
    out[2] = -u[2];
  };
  return SplitOdeProblem("bi_directional", 3, linear, nonlinear, 0.0, 2.0,
                         State{{9001.0 / 10001.0, 100000.0 / 10001.0, 1000.0}}, std::move(l));
}

SplitOdeProblem make_problem(ProblemId id) {
  switch (id) {
    case ProblemId::kReactionDiffusion: return make_reaction_diffusion();
    case ProblemId::kBrusselator: return make_brusselator();
    case ProblemId::kOneDirectional: return make_one_directional();
    case ProblemId::kBiDirectional: return make_bi_directional();
  }
  throw ContractViolation("unknown problem id");
}

ReferenceSolution ReferenceSolution::from_function(ReferenceKind kind, Evaluator f) {
  ReferenceSolution r;
  r.kind_ = kind;
  r.eval_ = std::move(f);
  return r;
}

ReferenceSolution ReferenceSolution::tabulated(double t0, double spacing,
                                               std::vector<State> values) {
  if (!(spacing > 0.0) || values.empty()) {
    throw ContractViolation("tabulated reference needs values and a positive spacing");
  }
  ReferenceSolution r;
  r.kind_ = ReferenceKind::kFineRk;
  r.t0_ = t0;
  r.spacing_ = spacing;
  r.values_ = std::move(values);
  return r;
}

State ReferenceSolution::at(double t) const {
  if (eval_) return eval_(t);
  const double pos = (t - t0_) / spacing_;
  const double k = std::round(pos);
  if (std::abs(pos - k) > 1e-8 * std::max(1.0, pos) || k < 0.0 ||
      k >= static_cast<double>(values_.size())) {
    throw ContractViolation("time " + std::to_string(t) + " is not on the reference grid");
  }
  return values_[static_cast<std::size_t>(k)];
}

std::vector<State> fine_rk_solution(const SplitOdeProblem& problem, double spacing,
                                    double h_ref) {
  const std::size_t points = macro_step_count(problem.t0(), problem.t_end(), spacing);
  const ButcherTableau& tab = tableau_of_order(5);
  RkWorkspace ws(tab, problem.dimension());
  State lin(problem.dimension());
  auto rhs = [&](double t, const State& y, State& out) {
    problem.apply_linear(y, lin);
    problem.evaluate_nonlinear(t, y, out);
    out += lin;
  };
  const std::size_t sub = steps_for_piece(spacing, h_ref);
  const double h = spacing / static_cast<double>(sub);
  std::vector<State> out;
  out.reserve(points + 1);
  State y = problem.u0();
  out.push_back(y);
  for (std::size_t k = 0; k < points; ++k) {
    const double t_start = problem.t0() + static_cast<double>(k) * spacing;
    for (std::size_t i = 0; i < sub; ++i) {
      rk_step(tab, rhs, t_start + static_cast<double>(i) * h, h, y, ws);
    }
    out.push_back(y);
  }
  return out;
}

std::optional<std::filesystem::path> default_cache_dir() {
  if (const char* env = std::getenv("MERK_REFERENCE_CACHE")) {
    if (std::string(env).empty()) return std::nullopt;
    return std::filesystem::path(env);
  }
  std::error_code ec;
  auto tmp = std::filesystem::temp_directory_path(ec);
  if (ec) return std::nullopt;
  return tmp / "merk-reference-cache";
}

namespace {

std::string cache_key(ProblemId id, const SplitOdeProblem& p, double spacing, double h_ref) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s_d%ld_t%.17g-%.17g_dt%.17g_href%.17g.ref",
                std::string(to_string(id)).c_str(), static_cast<long>(p.dimension()), p.t0(),
                p.t_end(), spacing, h_ref);
  return buf;
}

std::optional<std::vector<State>> load_cache(const std::filesystem::path& file, Eigen::Index dim,
                                             std::size_t expected_points) {
  std::ifstream in(file);
  if (!in) return std::nullopt;
  std::string header;
  std::getline(in, header);
  std::istringstream hs(header);
  std::string magic;
  long d = 0;
  std::size_t n = 0;
  if (!(hs >> magic >> d >> n) || magic != "merk-reference-v1" || d != dim ||
      n != expected_points) {
    return std::nullopt;
  }
  std::vector<State> values(n, State(dim));
  for (auto& v : values) {
    double t = 0.0;
    if (!(in >> t)) return std::nullopt;
    for (Eigen::Index i = 0; i < dim; ++i) {
      if (!(in >> v[i])) return std::nullopt;
    }
  }
  return values;
}

void store_cache(const std::filesystem::path& file, double t0, double spacing,
                 const std::vector<State>& values) {
  std::error_code ec;
  std::filesystem::create_directories(file.parent_path(), ec);
  if (ec) return;
  const auto tmp = file.string() + ".tmp" + std::to_string(std::rand());
  {
    std::ofstream out(tmp);
    if (!out) return;
    out << "merk-reference-v1 " << values.front().size() << ' ' << values.size() << '\n';
    char buf[64];
    for (std::size_t k = 0; k < values.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", t0 + static_cast<double>(k) * spacing);
      out << buf;
      for (Eigen::Index i = 0; i < values[k].size(); ++i) {
        std::snprintf(buf, sizeof buf, " %.17g", values[k][i]);
        out << buf;
      }
      out << '\n';
    }
  }
  std::filesystem::rename(tmp, file, ec);
  if (ec) std::filesystem::remove(tmp, ec);
}

}  // namespace

ReferenceSolution make_reference(ProblemId id, double spacing, double h_ref,
                                 const std::optional<std::filesystem::path>& cache_dir) {
  switch (spec_of(id).reference) {
    case ReferenceKind::kAnalytic:
      return ReferenceSolution::from_function(ReferenceKind::kAnalytic,
                                              analytic_solution_one_directional);
    case ReferenceKind::kExpmExact: {
      const SplitOdeProblem p = make_problem(id);
      const DenseMatrix full = bi_directional_full_matrix();
      const State u0 = p.u0();
      const double t0 = p.t0();
      return ReferenceSolution::from_function(
          ReferenceKind::kExpmExact,
          [full, u0, t0](double t) -> State { return oracle::expm((t - t0) * full) * u0; });
    }
    case ReferenceKind::kFineRk: {
      const SplitOdeProblem p = make_problem(id);
      const std::size_t points = macro_step_count(p.t0(), p.t_end(), spacing) + 1;
      std::optional<std::filesystem::path> file;
      if (cache_dir) {
        file = *cache_dir / cache_key(id, p, spacing, h_ref);
        if (auto cached = load_cache(*file, p.dimension(), points)) {
          return ReferenceSolution::tabulated(p.t0(), spacing, std::move(*cached));
        }
      }
      auto values = fine_rk_solution(p, spacing, h_ref);
      if (file) store_cache(*file, p.t0(), spacing, values);
      return ReferenceSolution::tabulated(p.t0(), spacing, std::move(values));
    }
  }
  throw ContractViolation("unknown reference kind");
}

}  // namespace merk::problems
