#include <benchmark/benchmark.h>

#include "rankone/factored.hpp"
#include "rankone/fourier.hpp"
#include "rankone/frames.hpp"
#include "rankone/lifted.hpp"

using namespace rankone;

namespace {

void BM_ZUpdate(benchmark::State& state) {
  const Index N = state.range(0);
  Rng rng(Seed(1));
  const ComplexMatrix u = rng.normal_matrix<Complex>(N, 2);
  const RealVector b = rng.normal_vector<double>(N).cwiseAbs();
  for (auto _ : state) benchmark::DoNotOptimize(z_update<Complex>(u, b, 0.01));
  state.SetItemsProcessed(state.iterations() * N);
}
BENCHMARK(BM_ZUpdate)->Arg(1000)->Arg(100000);

void BM_ProjectAffine(benchmark::State& state) {
  const Index n = state.range(0);
  const auto q = qr_standardize(gaussian_frame<double>(2 * n - 1, n, Seed(2))).first;
  Rng rng(Seed(3));
  const RealVector b_sq = (q.matrix() * rng.normal_vector<double>(n)).cwiseAbs2();
  const RealMatrix z = rng.normal_matrix<double>(n, n);
  const RealMatrix zs = 0.5 * (z + z.transpose());
  GramFactor<double> gram(q);
  for (auto _ : state) benchmark::DoNotOptimize(project_affine(q, zs, b_sq, &gram));
}
BENCHMARK(BM_ProjectAffine)->Arg(10)->Arg(50);

void BM_SigmaBoost(benchmark::State& state) {
  const Index n = state.range(0);
  Rng rng(Seed(4));
  const RealMatrix g = rng.normal_matrix<double>(n, n);
  const RealMatrix m = 0.5 * (g + g.transpose());
  for (auto _ : state) benchmark::DoNotOptimize(psd_sigma_boost<double>(m, 1.0));
}
BENCHMARK(BM_SigmaBoost)->Arg(10)->Arg(50);

void BM_LiftedAdm(benchmark::State& state) {
  const Index n = state.range(0);
  const auto q = qr_standardize(gaussian_frame<double>(2 * n - 1, n, Seed(5))).first;
  Rng rng(Seed(6));
  const RealVector b_sq = (q.matrix() * rng.unit_vector<double>(n)).cwiseAbs2();
  GramFactor<double> gram(q);
  const RealMatrix init = default_lifted_init(q, b_sq, &gram);
  LiftedOptions opt;
  opt.max_iter = 100;
  opt.tol = 0;
  for (auto _ : state) benchmark::DoNotOptimize(lifted_adm(q, b_sq, init, opt, &gram));
  state.SetItemsProcessed(state.iterations() * opt.max_iter);
}
BENCHMARK(BM_LiftedAdm)->Arg(10)->Arg(30)->Unit(benchmark::kMillisecond);

void BM_Rank1Adm(benchmark::State& state) {
  const Index n = state.range(0);
  const auto a = gaussian_frame<double>(4 * n, n, Seed(7));
  Rng rng(Seed(8));
  const RealVector b = (a.matrix() * rng.unit_vector<double>(n)).cwiseAbs();
  const RealVector x_init = rng.normal_vector<double>(n);
  AdmOptions opt;
  opt.max_iter = 500;
  opt.tol = -1;
  opt.stationary_tol = -1;
  for (auto _ : state) benchmark::DoNotOptimize(run_rank1_adm(a, b, x_init, opt));
  state.SetItemsProcessed(state.iterations() * opt.max_iter);
}
BENCHMARK(BM_Rank1Adm)->Arg(60)->Unit(benchmark::kMillisecond);

void BM_FourierApply(benchmark::State& state) {
  const Index side = state.range(0);
  const FourierOperator op(side, side, 1.23, Illumination::kRandomPhase, Seed(9));
  Rng rng(Seed(10));
  const ComplexMatrix x = rng.normal_matrix<Complex>(side * side, 2);
  for (auto _ : state) benchmark::DoNotOptimize(op.adjoint(op.apply(x)));
}
BENCHMARK(BM_FourierApply)->Arg(32)->Arg(128)->Unit(benchmark::kMicrosecond);

void BM_EqualNormStandardize(benchmark::State& state) {
  const Index n = state.range(0);
  const RealMatrix a = gaussian_frame<double>(3 * n, n, Seed(11)).matrix();
  for (auto _ : state) benchmark::DoNotOptimize(equal_norm_standardize(a));
}
BENCHMARK(BM_EqualNormStandardize)->Arg(20)->Arg(60)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
