#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "physarum/error.hpp"
#include "physarum/oracles.hpp"
#include "physarum/problems.hpp"
#include "physarum/solver.hpp"

using namespace physarum;

namespace {

StandardFormLP segment(Vector c) { return {Matrix{{1, 1}}, {1}, std::move(c), {}}; }

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidArgument;
}

PreparedLP prepared_segment(Vector c_hat) {
  SolverConfig cfg;
  return prepare(segment(std::move(c_hat)), cfg);
}

}  // namespace

TEST_CASE("perturb_cost examples") {
  CHECK(perturb_cost(Vector{1, 0, 2}, 0.5) == Vector{1, 0.5, 2});
  CHECK(perturb_cost(Vector{1, 2}, 0.5) == Vector{1, 2});
  CHECK(perturb_cost(Vector{0, 0}, 1e-3) == Vector{1e-3, 1e-3});
  CHECK(perturb_cost(Vector{1, 2}, 0.0) == Vector{1, 2});
  CHECK(code_of([] { perturb_cost(Vector{1, 0}, 0.0); }) == ErrorCode::ZeroCostNeedsGamma);
}

TEST_CASE("flip is the identity without negative costs") {
  const auto prep = flip_negative_costs(segment({1, 1}), std::nullopt);
  CHECK(prep.flip_mask == std::vector<bool>{false, false});
  CHECK(prep.lp.a == Matrix{{1, 1}});
  CHECK(prep.lp.b == Vector{1});
  CHECK(prep.objective_offset == 0.0);
}

TEST_CASE("negative costs need a bound") {
  CHECK(code_of([] { flip_negative_costs(segment({-1, 0}), std::nullopt); }) == ErrorCode::MissingBound);
}

TEST_CASE("flip of min -x1 on the unit segment") {
  const auto lp = segment({-1, 0});
  const auto prep = flip_negative_costs(lp, 1.0);
  CHECK(prep.flip_mask == std::vector<bool>{true, false});
  CHECK(prep.lp.a == Matrix{{-1, 1}});
  CHECK(prep.lp.b == Vector{0});
  CHECK(prep.lp.c == Vector{1, 0});
  CHECK(prep.objective_offset == -1.0);
  // Un-flipping recovers the original coordinates.
  CHECK(prep.decode(prep.encode(Vector{0.25, 0.75})) == Vector{0.25, 0.75});

  const auto oracle = oracles::enumerate_vertices(lp);
  CHECK(oracle.objective == -1.0);
  CHECK(oracle.x_star == Vector{1, 0});

  SolverConfig cfg;
  cfg.max_iters = 100;
  cfg.flip_bound = 1.0;
  const auto res = solve(lp, cfg);
  CHECK(std::abs(res.objective - oracle.objective) <= 1e-3);
  CHECK(res.x[0] == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("flip of min -x1-x2 on the unit segment") {
  const auto lp = segment({-1, -1});
  const auto oracle = oracles::enumerate_vertices(lp);
  CHECK(oracle.objective == -1.0);
  SolverConfig cfg;
  cfg.max_iters = 50;
  cfg.flip_bound = 1.0;
  const auto res = solve(lp, cfg);
  CHECK(std::abs(res.objective - oracle.objective) <= 1e-6);
}

TEST_CASE("prepared costs are strictly positive and recover the original") {
  StandardFormLP lp{Matrix{{1, 1, 1}, {1, -1, 0}}, {2, 0}, {-2, 0, 3}, {}};
  SolverConfig cfg;
  cfg.flip_bound = 5.0;
  cfg.gamma = 0.01;
  const auto prep = prepare(lp, cfg);
  for (double c : prep.lp.c) CHECK(c >= 0.01);
  CHECK(prep.gamma_applied == 0.01);
  CHECK(prep.original_c == lp.c);
  // Reverse the flip on A and b.
  Matrix a = prep.lp.a;
  Vector b = prep.lp.b;
  for (std::size_t j = 0; j < 3; ++j) {
    if (!prep.flip_mask[j]) continue;
    for (std::size_t i = 0; i < 2; ++i) {
      a(i, j) = -a(i, j);
      b[i] += prep.flip_bound * a(i, j);
    }
  }
  CHECK(a == lp.a);
  CHECK(b == lp.b);
}

TEST_CASE("symmetric step is a fixed point") {
  const auto prep = prepared_segment({1, 1});
  StepRecord rec;
  const auto next = physarum_step(prep, {{0.5, 0.5}, 0}, SolverConfig{}, &rec);
  CHECK(rec.w == Vector{0.5, 0.5});
  CHECK(rec.l(0, 0) == 1.0);
  CHECK(rec.p[0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(next.x[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(next.x[1] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(next.iter == 1);
}

TEST_CASE("asymmetric step by hand") {
  // W = diag(0.5, 0.25), L = 0.75, p = 4/3, q = (2/3, 1/3).
  const auto prep = prepared_segment({1, 2});
  StepRecord rec;
  const auto next = physarum_step(prep, {{0.5, 0.5}, 0}, SolverConfig{}, &rec);
  CHECK(rec.l(0, 0) == 0.75);
  CHECK(rec.p[0] == doctest::Approx(4.0 / 3.0).epsilon(1e-9));
  CHECK(next.x[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
  CHECK(next.x[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("100 steps reach the optimal vertex") {
  const auto lp = segment({1, 2});
  const auto oracle = oracles::enumerate_vertices(lp);
  CHECK(oracle.x_star == Vector{1, 0});
  const auto prep = prepare(lp, SolverConfig{});
  SolverConfig cfg;
  PhysarumState st{{0.5, 0.5}, 0};
  for (int k = 0; k < 100; ++k) st = physarum_step(prep, st, cfg);
  CHECK(st.x[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(st.x[1] >= cfg.clamp_floor);
  CHECK(st.x[1] < 1e-6);
  CHECK(std::abs(objective(lp, st.x) - oracle.objective) <= 1e-3);
}

TEST_CASE("solve examples") {
  SolverConfig cfg;
  cfg.max_iters = 100;
  const auto res = solve(segment({1, 2}), cfg);
  CHECK(res.objective >= 1.0 - 1e-9);
  CHECK(res.objective <= 1.001);
  CHECK(res.x[0] == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(res.trace.size() <= 100);

  const auto flat = solve(segment({1, 1}), SolverConfig{});
  CHECK(flat.objective == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("status and early stop") {
  SolverConfig cfg;
  cfg.max_iters = 200;
  const auto res = solve(segment({1, 2}), cfg);
  CHECK(res.status == SolveStatus::Converged);
  CHECK(res.residual <= cfg.residual_tol);
  CHECK(res.trace.size() < 200);

  cfg.early_stop = false;
  CHECK(solve(segment({1, 2}), cfg).trace.size() == 200);
}

TEST_CASE("x0 must be strictly positive") {
  CHECK(code_of([] { solve(segment({1, 2}), SolverConfig{}, Vector{1, 0}); }) ==
        ErrorCode::NonPositiveInit);
  CHECK(code_of([] { solve(segment({1, 2}), SolverConfig{}, Vector{1}); }) ==
        ErrorCode::DimensionMismatch);
}

TEST_CASE("zero cost with gamma 0 is an error") {
  SolverConfig cfg;
  cfg.gamma = 0.0;
  CHECK(code_of([&] { solve(segment({1, 0}), cfg); }) == ErrorCode::ZeroCostNeedsGamma);
}

TEST_CASE("unrecoverable linear solves end with LinSolveFailure") {
  // A zero row with a nonzero right-hand side and no ridge leaves L singular
  // and inconsistent, so the retry fails too.
  StandardFormLP lp{Matrix{{1, 1}, {0, 0}}, {1, 1}, {1, 2}, {}};
  SolverConfig cfg;
  cfg.linsolve_reg = 0.0;
  const auto res = solve(lp, cfg);
  CHECK(res.status == SolveStatus::LinSolveFailure);
  CHECK(res.trace.empty());
}

TEST_CASE("iterates stay above the clamp floor") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const auto lp = random_bounded_lp(1 + trial % 4, 6 + trial % 3, rng);
    SolverConfig cfg;
    cfg.max_iters = 60;
    cfg.seed = static_cast<std::uint64_t>(trial);
    const auto res = solve(lp, cfg);
    for (const auto& rec : res.trace) CHECK(rec.min_x >= cfg.clamp_floor);
    for (double v : res.x) CHECK(v >= cfg.clamp_floor);
  }
}

TEST_CASE("feasibility attraction on random bounded LPs") {
  std::mt19937_64 rng(1234);
  int ok = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 1 + static_cast<std::size_t>(trial % 4);
    const auto lp = random_bounded_lp(m, m + 2 + static_cast<std::size_t>(trial % 5), rng);
    SolverConfig cfg;
    cfg.max_iters = 200;
    cfg.step_size = trial % 2 == 0 ? 1.0 : 0.5;
    cfg.seed = static_cast<std::uint64_t>(trial);
    const auto res = solve(lp, cfg);
    if (res.residual <= 1e-6 * (1.0 + norm2(lp.b))) ++ok;
  }
  CHECK(ok >= 99);
}

TEST_CASE("step is invariant under uniform cost scaling") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    const auto lp = random_bounded_lp(3, 7, rng);
    auto scaled = lp;
    for (double& c : scaled.c) c *= 37.5;
    const Vector x = random_start(7, static_cast<std::uint64_t>(trial));
    SolverConfig cfg;
    const auto a = physarum_step(prepare(lp, cfg), {x, 0}, cfg);
    const auto b = physarum_step(prepare(scaled, cfg), {x, 0}, cfg);
    for (std::size_t j = 0; j < x.size(); ++j) {
      CHECK(std::abs(a.x[j] - b.x[j]) <= 1e-12 * std::max(1.0, std::abs(a.x[j])));
    }
  }
}

TEST_CASE("identical seeds give bit-identical traces") {
  std::mt19937_64 rng(5);
  const auto lp = build_matching_lp({random_cost_matrix(3, 6, rng), std::nullopt});
  SolverConfig cfg;
  cfg.max_iters = 30;
  cfg.seed = 99;
  const auto a = solve(lp, cfg);
  const auto b = solve(lp, cfg);
  CHECK(a.x == b.x);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t k = 0; k < a.trace.size(); ++k) {
    CHECK(a.trace[k].objective == b.trace[k].objective);
    CHECK(a.trace[k].residual == b.trace[k].residual);
  }
  cfg.seed = 100;
  CHECK(solve(lp, cfg).x != a.x);
}

TEST_CASE("random start draws from (0,1)") {
  const Vector x = random_start(1000, 3);
  for (double v : x) {
    CHECK(v > 0.0);
    CHECK(v < 1.0);
  }
  CHECK(random_start(5, 3) == random_start(5, 3));
}

TEST_CASE("default gamma") {
  CHECK(default_gamma(segment({1, 0})) == doctest::Approx(1.0 / (2.0 * std::sqrt(3.0))));
}
