#include <benchmark/benchmark.h>

#include "merk/erk.hpp"
#include "merk/merk.hpp"
#include "merk/phi.hpp"
#include "merk/problems.hpp"
#include "merk/scheme.hpp"
#include "merk/tableau.hpp"

using namespace merk;

namespace {

// One macro step on the 1000-node reaction-diffusion problem, H = 0.15, h = 1e-3.
void BM_MerkStepReactionDiffusion(benchmark::State& st) {
  const auto scheme = make_merk(static_cast<MerkName>(st.range(0)));
  const auto problem = problems::make_reaction_diffusion();
  const auto& tab = tableau_of_order(scheme.order());
  const auto solver = make_erk_solver(tab, 1e-3);
  for (auto _ : st) {
    benchmark::DoNotOptimize(merk_step(scheme, problem, solver, solver, 0.0, problem.u0(), 0.15));
  }
  st.SetLabel(to_string(scheme.name()));
}
BENCHMARK(BM_MerkStepReactionDiffusion)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

void BM_ErkIntegrate(benchmark::State& st) {
  const auto problem = problems::make_reaction_diffusion();
  const auto n = problem.dimension();
  FastIvp ivp{&problem,
              ForcingPolynomial({State::Constant(n, 0.1), State::Constant(n, 0.01), State::Constant(n, 0.001)}),
              problem.u0(),
              0.1,
              Rational(1),
              {Rational(1, 2), Rational(1)}};
  const auto& tab = tableau_of_order(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(erk_integrate(tab, ivp, 1e-3));
  st.SetItemsProcessed(st.iterations() * 100 * static_cast<std::int64_t>(tab.stages()));
}
BENCHMARK(BM_ErkIntegrate)->DenseRange(3, 6)->Unit(benchmark::kMicrosecond);

DenseMatrix random_matrix(Eigen::Index n, double norm) {
  DenseMatrix a = DenseMatrix::Random(n, n);
  return a * (norm / a.cwiseAbs().colwise().sum().maxCoeff());
}

void BM_Expm(benchmark::State& st) {
  const DenseMatrix a = random_matrix(st.range(0), 20.0);
  for (auto _ : st) benchmark::DoNotOptimize(oracle::expm(a));
}
BENCHMARK(BM_Expm)->Arg(3)->Arg(16)->Arg(64);

void BM_PhiAll(benchmark::State& st) {
  const DenseMatrix a = random_matrix(st.range(0), 5.0);
  for (auto _ : st) benchmark::DoNotOptimize(oracle::phi_all(4, a));
}
BENCHMARK(BM_PhiAll)->Arg(3)->Arg(16);

}  // namespace

BENCHMARK_MAIN();
