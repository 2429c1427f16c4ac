#pragma once

// Shared by the autodiff unit tests and the acceptance suite.

#include <algorithm>
#include <cmath>
#include <random>

#include "physarum/autodiff.hpp"
#include "physarum/problems.hpp"

namespace physarum::testing {

struct GradCheck {
  double max_rel_error = 0.0;
  double dot_rel_error = 0.0;
  std::size_t compared = 0;
  std::size_t excluded_columns = 0;
};

// Relative error with a floor tied to the gradient scale, so entries at the
// level of finite-difference noise are compared absolutely.
inline double rel_error(double analytic, double numeric, double floor) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
}

// backward() against finite_diff_grad() for the loss Σ wᵢxᵢ, and the dot-product
// test ⟨w, J·δ⟩ = ⟨Jᵀw, δ⟩ along a random direction δ. Columns whose clamp came
// within `margin` of ε are left out of the finite-difference comparison.
inline GradCheck check_gradients(const StandardFormLP& lp, const SolverConfig& cfg,
                                 std::mt19937_64& rng, double margin = 1e-6) {
  const std::size_t m = lp.num_rows();
  const std::size_t n = lp.num_vars();
  std::normal_distribution<double> g(0.0, 1.0);
  Vector w(n);
  for (double& v : w) v = g(rng);

  auto [res, tape] = solve_with_tape(lp, cfg);
  const LpGradients an = backward(tape, w);
  const LossFn loss = [w](std::span<const double> x) { return dot(w, x); };
  const LpGradients fd = finite_diff_grad(lp, cfg, loss);
  const auto touched = clamp_touched(tape, margin);

  GradCheck out;
  double scale = 0.0;
  for (double v : fd.grad_c) scale = std::max(scale, std::abs(v));
  for (double v : fd.grad_a.data()) scale = std::max(scale, std::abs(v));
  for (double v : fd.grad_b) scale = std::max(scale, std::abs(v));
  const double floor = 1e-6 * (1.0 + scale);

  for (std::size_t j = 0; j < n; ++j) {
    if (touched[j]) {
      ++out.excluded_columns;
      continue;
    }
    out.max_rel_error = std::max(out.max_rel_error, rel_error(an.grad_c[j], fd.grad_c[j], floor));
    for (std::size_t i = 0; i < m; ++i) {
      out.max_rel_error = std::max(out.max_rel_error, rel_error(an.grad_a(i, j), fd.grad_a(i, j), floor));
    }
    out.compared += 1 + m;
  }
  for (std::size_t i = 0; i < m; ++i) {
    out.max_rel_error = std::max(out.max_rel_error, rel_error(an.grad_b[i], fd.grad_b[i], floor));
    ++out.compared;
  }

  Vector dc(n), db(m);
  Matrix da(m, n);
  for (std::size_t j = 0; j < n; ++j) dc[j] = lp.c[j] == 0.0 ? 0.0 : g(rng);
  for (double& v : da.data()) v = g(rng);
  for (double& v : db) v = g(rng);
  const Vector dx = jvp(tape, dc, da, db);
  const double lhs = dot(w, dx);
  const double rhs = dot(an.grad_c, dc) + dot(an.grad_a.data(), da.data()) + dot(an.grad_b, db);
  out.dot_rel_error = std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1e-300});
  return out;
}

}  // namespace physarum::testing
