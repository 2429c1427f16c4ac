#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <omp.h>

#include <random>

#include "physarum/kernels.hpp"
#include "physarum/problems.hpp"
#include "physarum/solver.hpp"

using namespace physarum;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix a(r, c);
  for (double& v : a.data()) v = g(rng);
  return a;
}

Vector random_positive(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.01, 2.0);
  Vector v(n);
  for (double& e : v) e = u(rng);
  return v;
}

}  // namespace

TEST_CASE("normal matrix by hand") {
  const Matrix a{{1, 2}, {0, 1}};
  const Vector w{2, 3};
  // A diag(w) Aᵀ = [[2+12, 6], [6, 3]]
  CHECK(kernels::serial::normal_matrix(a, w) == Matrix{{14, 6}, {6, 3}});
  CHECK(kernels::serial::scaled_transpose_product(a, w, Vector{1, 1}) == Vector{2, 9});
  CHECK(kernels::serial::residual_norm(a, Vector{1, 1}, Vector{0, 0}) == doctest::Approx(std::sqrt(10.0)));
}

TEST_CASE("OpenMP kernels are bit-identical to the serial reference") {
  std::mt19937_64 rng(17);
  for (int threads : {1, 2, 4, 7}) {
    omp_set_num_threads(threads);
    for (auto [r, c] : {std::pair{1u, 1u}, {3u, 9u}, {55u, 300u}, {64u, 17u}}) {
      const Matrix a = random_matrix(r, c, rng);
      const Vector w = random_positive(c, rng);
      const Vector p = random_positive(r, rng);
      const Vector x = random_positive(c, rng);
      CHECK(kernels::omp::normal_matrix(a, w) == kernels::serial::normal_matrix(a, w));
      CHECK(kernels::omp::scaled_transpose_product(a, w, p) ==
            kernels::serial::scaled_transpose_product(a, w, p));
      CHECK(kernels::omp::residual_norm(a, x, p) == kernels::serial::residual_norm(a, x, p));
    }
  }
}

TEST_CASE("a whole solve is identical under both kernels") {
  std::mt19937_64 rng(4);
  const auto lp = build_matching_lp({random_cost_matrix(5, 50, rng), std::nullopt});
  SolverConfig cfg;
  cfg.max_iters = 20;
  cfg.early_stop = false;
  const auto serial = solve(lp, cfg);
  cfg.kernel = Kernel::Parallel;
  omp_set_num_threads(4);
  const auto parallel = solve(lp, cfg);
  CHECK(serial.x == parallel.x);
  CHECK(serial.objective == parallel.objective);
  CHECK(serial.residual == parallel.residual);
}
