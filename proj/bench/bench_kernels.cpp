// Serial vs OpenMP kernels on matching-shaped LPs, plus whole solves.

#include <benchmark/benchmark.h>

#include <random>

#include "physarum/kernels.hpp"
#include "physarum/problems.hpp"
#include "physarum/solver.hpp"

namespace {

using namespace physarum;

struct Fixture {
  StandardFormLP lp;
  Vector w;
  Vector p;
};

// Matching LP with n = m/10 templates and m proposals.
Fixture make_fixture(std::size_t m) {
  std::mt19937_64 rng(7);
  const std::size_t n = std::max<std::size_t>(1, m / 10);
  Fixture f;
  f.lp = build_matching_lp({random_cost_matrix(n, m, rng), std::nullopt});
  std::uniform_real_distribution<double> unit(0.1, 1.0);
  f.w.resize(f.lp.num_vars());
  for (double& v : f.w) v = unit(rng);
  f.p.resize(f.lp.num_rows());
  for (double& v : f.p) v = unit(rng);
  return f;
}

template <Kernel K>
void BM_NormalMatrix(benchmark::State& state) {
  const auto f = make_fixture(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::normal_matrix(K, f.lp.a, f.w));
  state.counters["rows"] = static_cast<double>(f.lp.num_rows());
  state.counters["cols"] = static_cast<double>(f.lp.num_vars());
}

template <Kernel K>
void BM_ScaledTransposeProduct(benchmark::State& state) {
  const auto f = make_fixture(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::scaled_transpose_product(K, f.lp.a, f.w, f.p));
}

template <Kernel K>
void BM_Solve(benchmark::State& state) {
  const auto f = make_fixture(static_cast<std::size_t>(state.range(0)));
  SolverConfig cfg;
  cfg.max_iters = 10;
  cfg.early_stop = false;
  cfg.kernel = K;
  for (auto _ : state) benchmark::DoNotOptimize(solve(f.lp, cfg));
}

}  // namespace

BENCHMARK(BM_NormalMatrix<Kernel::Serial>)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_NormalMatrix<Kernel::Parallel>)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_ScaledTransposeProduct<Kernel::Serial>)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ScaledTransposeProduct<Kernel::Parallel>)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_Solve<Kernel::Serial>)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Solve<Kernel::Parallel>)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
