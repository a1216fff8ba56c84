#include "merk/phi.hpp"

#include <array>
#include <cmath>
#include <string>

#include <Eigen/LU>

#include "merk/errors.hpp"

namespace merk::oracle {
namespace {

void check_oracle_matrix(const DenseMatrix& a) {
  if (a.rows() != a.cols()) throw ContractViolation("oracle matrix must be square");
  if (a.rows() > kMaxOracleDimension) {
    throw OracleScaleExceeded("oracle routines are limited to d <= " +
                              std::to_string(kMaxOracleDimension) + " (got " +
                              std::to_string(a.rows()) + ")");
  }
  if (!a.allFinite()) throw ContractViolation("oracle matrix has non-finite entries");
}

// Pade [m/m] coefficients for m = 3, 5, 7, 9 and the theta_m bounds for
// double precision.
constexpr std::array<double, 4> kPadeTheta = {1.495585217958292e-2, 2.539398330063230e-1,
                                             9.504178996162932e-1, 2.097847961257068e0};
constexpr double kTheta13 = 5.371920351148152e0;

constexpr std::array<double, 4> kPade3 = {120.0, 60.0, 12.0, 1.0};
constexpr std::array<double, 6> kPade5 = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
constexpr std::array<double, 8> kPade7 = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                                          25200.0,    1512.0,    56.0,      1.0};
constexpr std::array<double, 10> kPade9 = {17643225600.0, 8821612800.0, 2075673600.0,
                                           302702400.0,   30270240.0,   2162160.0,
                                           110880.0,      3960.0,       90.0,
                                           1.0};
constexpr std::array<double, 14> kPade13 = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
    1187353796428800.0,  129060195264000.0,   10559470521600.0,
    670442572800.0,      33522128640.0,       1323241920.0,
    40840800.0,          960960.0,            16380.0,
    182.0,               1.0};

template <std::size_t N>
DenseMatrix pade_low(const DenseMatrix& a, const std::array<double, N>& b) {
  const auto n = a.rows();
  const DenseMatrix id = DenseMatrix::Identity(n, n);
  const DenseMatrix a2 = a * a;
  DenseMatrix power = id;  // a^(2j)
  DenseMatrix u_inner = DenseMatrix::Zero(n, n);
  DenseMatrix v = DenseMatrix::Zero(n, n);
  for (std::size_t j = 0; 2 * j < N; ++j) {
    v += b[2 * j] * power;
    if (2 * j + 1 < N) u_inner += b[2 * j + 1] * power;
    power = power * a2;
  }
  const DenseMatrix u = a * u_inner;
  return (v - u).partialPivLu().solve(v + u);
}

DenseMatrix pade13(const DenseMatrix& a) {
  const auto& b = kPade13;
  const auto n = a.rows();
  const DenseMatrix id = DenseMatrix::Identity(n, n);
  const DenseMatrix a2 = a * a;
  const DenseMatrix a4 = a2 * a2;
  const DenseMatrix a6 = a4 * a2;
  const DenseMatrix u_inner =
      a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id;
  const DenseMatrix u = a * u_inner;
  const DenseMatrix v =
      a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
  return (v - u).partialPivLu().solve(v + u);
}

DenseMatrix expm_unchecked(const DenseMatrix& a) {
  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  if (norm1 <= kPadeTheta[0]) return pade_low(a, kPade3);
  if (norm1 <= kPadeTheta[1]) return pade_low(a, kPade5);
  if (norm1 <= kPadeTheta[2]) return pade_low(a, kPade7);
  if (norm1 <= kPadeTheta[3]) return pade_low(a, kPade9);
  const int squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm1 / kTheta13))));
  DenseMatrix r = pade13(a / std::ldexp(1.0, squarings));
  for (int i = 0; i < squarings; ++i) r = r * r;
  return r;
}

}  // namespace

DenseMatrix expm(const DenseMatrix& a) {
  check_oracle_matrix(a);
  return expm_unchecked(a);
}

std::vector<DenseMatrix> phi_all(int k, const DenseMatrix& a) {
  check_oracle_matrix(a);
  if (k < 0 || k > kMaxPhiIndex) {
    throw ContractViolation("phi index must lie in [0, " + std::to_string(kMaxPhiIndex) + "]");
  }
  const auto d = a.rows();
  if (a.isZero(0.0)) {
    // phi_j(0) = 1/j!, exact up to one rounding.
    std::vector<DenseMatrix> out;
    double factorial = 1.0;
    for (int j = 0; j <= k; ++j) {
      if (j > 0) factorial *= j;
      out.emplace_back(DenseMatrix::Identity(d, d) / factorial);
    }
    return out;
  }
  if (k == 0) return {expm_unchecked(a)};

  // [[A, I, 0, ...], [0, 0, I, ...], ..., [0, ..., 0]]; block (0, j) of the
  // exponential is phi_j(A).
  const auto n = (k + 1) * d;
  DenseMatrix aug = DenseMatrix::Zero(n, n);
  aug.topLeftCorner(d, d) = a;
  for (int j = 0; j < k; ++j) {
    aug.block(j * d, (j + 1) * d, d, d).setIdentity();
  }
  const DenseMatrix e = expm_unchecked(aug);
  std::vector<DenseMatrix> out;
  out.reserve(k + 1);
  for (int j = 0; j <= k; ++j) out.emplace_back(e.block(0, j * d, d, d));
  return out;
}

DenseMatrix phi(int k, const DenseMatrix& a) { return phi_all(k, a).back(); }

State solve_modified_ivp_exact(const DenseMatrix& l, const ForcingPolynomial& poly,
                               const State& y0, double t_final) {
  check_oracle_matrix(l);
  if (poly.dimension() != l.rows() || y0.size() != l.rows()) {
    throw ContractViolation("modified IVP dimension mismatch");
  }
  if (poly.degree() + 1 > static_cast<std::size_t>(kMaxPhiIndex)) {
    throw ContractViolation("forcing polynomial degree too high for the oracle");
  }
  const int kmax = static_cast<int>(poly.degree()) + 1;
  const auto phis = phi_all(kmax, t_final * l);
  State y = phis[0] * y0;
  double factorial = 1.0;              // j!
  double t_power = t_final;            // T^{j+1}
  for (std::size_t j = 0; j <= poly.degree(); ++j) {
    if (j > 0) factorial *= static_cast<double>(j);
    y += factorial * t_power * (phis[j + 1] * poly.coefficient(j));
    t_power *= t_final;
  }
  return y;
}

std::string_view to_string(ExpRkScheme s) {
  switch (s) {
    case ExpRkScheme::kExpRK2: return "expRK2";
    case ExpRkScheme::kExpRK3: return "expRK3";
    case ExpRkScheme::kExpRK4s6: return "expRK4s6";
    case ExpRkScheme::kExpRK5s10: return "expRK5s10";
  }
  return "unknown";
}

namespace {

// a_ij(HL) = sum_k coeff * phi_k(c_i H L), stored as (j, k, coeff). Stages and
// indices are 1-based as in the usual ExpRK notation.
struct PhiTerm {
  int stage;
  int k;
  double coeff;
};

struct ExpRkTable {
  std::size_t stages;
  std::vector<std::vector<PhiTerm>> stage_terms;  // index i = 1..s
  std::vector<PhiTerm> final_terms;
};

double c_at(const std::vector<double>& c, int i) { return c.at(static_cast<std::size_t>(i - 1)); }

ExpRkTable make_table(ExpRkScheme scheme, const std::vector<double>& c) {
  ExpRkTable t;
  auto need = [&](std::size_t s) {
    if (c.size() != s) {
      throw ContractViolation(std::string(to_string(scheme)) + " expects " +
                              std::to_string(s) + " abscissae");
    }
    if (c.front() != 0.0) throw ContractViolation("explicit ExpRK requires c_1 = 0");
    t.stages = s;
    t.stage_terms.assign(s + 1, {});
  };
  switch (scheme) {
    case ExpRkScheme::kExpRK2: {
      need(2);
      t.final_terms = {{2, 2, 1.0 / c_at(c, 2)}};
      break;
    }
    case ExpRkScheme::kExpRK3: {
      need(3);
      const double c2 = c_at(c, 2);
      t.stage_terms[3] = {{2, 2, 4.0 / (9.0 * c2)}};
      t.final_terms = {{3, 2, 1.5}};
      break;
    }
    case ExpRkScheme::kExpRK4s6: {
      need(6);
      const double c2 = c_at(c, 2), c3 = c_at(c, 3), c4 = c_at(c, 4);
      const double c5 = c_at(c, 5), c6 = c_at(c, 6);
      for (int k : {3, 4}) {
        const double ck = c_at(c, k);
        t.stage_terms[k] = {{2, 2, ck * ck / c2}};
      }
      for (int j : {5, 6}) {
        const double cj = c_at(c, j);
        const double s2 = cj * cj / (c3 - c4);
        const double s3 = 2.0 * cj * cj * cj / (c3 - c4);
        t.stage_terms[j] = {{3, 2, -s2 * c4 / c3},
                            {4, 2, s2 * c3 / c4},
                            {3, 3, s3 / c3},
                            {4, 3, -s3 / c4}};
      }
      const double f2 = 1.0 / (c5 - c6);
      const double f3 = 2.0 / (c5 - c6);
      t.final_terms = {{5, 2, -f2 * c6 / c5}, {6, 2, f2 * c5 / c6}, {5, 3, f3 / c5}, {6, 3, -f3 / c6}};
      break;
    }
    case ExpRkScheme::kExpRK5s10: {
      need(10);
      const double c2 = c_at(c, 2), c3 = c_at(c, 3), c4 = c_at(c, 4);
      const double alpha3 = c4 / (c3 * (c4 - c3));
      const double alpha4 = c3 / (c4 * (c3 - c4));
      const double beta3 = 2.0 / (c3 * (c3 - c4));
      const double beta4 = 2.0 / (c4 * (c3 - c4));
      // Triple-node weights for node a among {a, b, d}.
      struct Triple {
        double alpha, beta, gamma;
      };
      auto triple = [](double a, double b, double d) {
        const double den = a * (a - b) * (a - d);
        return Triple{b * d / den, 2.0 * (b + d) / den, 6.0 / den};
      };
      for (int k : {3, 4}) {
        const double ck = c_at(c, k);
        t.stage_terms[k] = {{2, 2, ck * ck / c2}};
      }
      for (int j : {5, 6, 7}) {
        const double cj = c_at(c, j);
        const double cj2 = cj * cj, cj3 = cj2 * cj;
        t.stage_terms[j] = {{3, 2, cj2 * alpha3}, {4, 2, cj2 * alpha4},
                            {3, 3, cj3 * beta3},  {4, 3, -cj3 * beta4}};
      }
      const double c5 = c_at(c, 5), c6 = c_at(c, 6), c7 = c_at(c, 7);
      const std::array<Triple, 3> mid = {triple(c5, c6, c7), triple(c6, c5, c7),
                                         triple(c7, c5, c6)};
      for (int m : {8, 9, 10}) {
        const double cm = c_at(c, m);
        const double cm2 = cm * cm, cm3 = cm2 * cm, cm4 = cm3 * cm;
        auto& terms = t.stage_terms[m];
        for (int idx = 0; idx < 3; ++idx) {
          const int j = 5 + idx;
          terms.push_back({j, 2, cm2 * mid[idx].alpha});
          // All three phi_3 weights enter with a minus sign (Lagrange form).
          terms.push_back({j, 3, -cm3 * mid[idx].beta});
          terms.push_back({j, 4, cm4 * mid[idx].gamma});
        }
      }
      const double c8 = c_at(c, 8), c9 = c_at(c, 9), c10 = c_at(c, 10);
      const std::array<Triple, 3> last = {triple(c8, c9, c10), triple(c9, c8, c10),
                                          triple(c10, c8, c9)};
      for (int idx = 0; idx < 3; ++idx) {
        const int i = 8 + idx;
        t.final_terms.push_back({i, 2, last[idx].alpha});
        t.final_terms.push_back({i, 3, -last[idx].beta});
        t.final_terms.push_back({i, 4, last[idx].gamma});
      }
      break;
    }
  }
  return t;
}

int max_k(const std::vector<PhiTerm>& terms) {
  int k = 1;
  for (const auto& term : terms) k = std::max(k, term.k);
  return k;
}

}  // namespace

State exprk_step(ExpRkScheme scheme, const std::vector<double>& abscissae,
                 const SplitOdeProblem& problem, double t_n, const State& u_n, double step) {
  if (!problem.dense_linear()) {
    throw OracleScaleExceeded("exprk_step requires a dense linear operator");
  }
  if (!(step > 0.0)) throw ContractViolation("exprk_step requires H > 0");
  const DenseMatrix& l = *problem.dense_linear();
  check_oracle_matrix(l);
  const ExpRkTable table = make_table(scheme, abscissae);

  const State f_n = problem.evaluate_full_rhs(t_n, u_n);
  const State n_n = problem.evaluate_nonlinear(t_n, u_n);
  std::vector<State> d(table.stages + 1);

  auto combine = [&](double ci, const std::vector<PhiTerm>& terms) {
    const auto phis = phi_all(max_k(terms), ci * step * l);
    State u = u_n + ci * step * (phis[1] * f_n);
    for (const auto& term : terms) {
      u += step * term.coeff * (phis[term.k] * d.at(term.stage));
    }
    return u;
  };

  for (std::size_t i = 2; i <= table.stages; ++i) {
    const double ci = abscissae[i - 1];
    const State u_i = combine(ci, table.stage_terms[i]);
    d[i] = problem.evaluate_nonlinear(t_n + ci * step, u_i) - n_n;
  }
  return combine(1.0, table.final_terms);
}

}  // namespace merk::oracle
