#pragma once

#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "physarum/solver.hpp"

namespace physarum {

/// Everything the reverse pass needs from one forward solve.
struct UnrolledTape {
  PreparedLP prepared;
  SolverConfig config;
  std::vector<StepRecord> steps;
  Vector x_initial;  // prepared coordinates
  Vector x_final;    // prepared coordinates
};

struct LpGradients {
  Vector grad_c;
  Matrix grad_a;
  Vector grad_b;
};

/// Same as solve(), plus the tape. Early stopping is off unless
/// allow_early_stop is set, so K fixes the computation graph.
std::pair<SolveResult, UnrolledTape> solve_with_tape(
    const StandardFormLP& lp, const SolverConfig& cfg,
    std::optional<std::span<const double>> x0 = std::nullopt, bool allow_early_stop = false);

/// Re-runs the recorded iterations from the stored start and returns the final
/// iterate in original coordinates.
Vector replay(const UnrolledTape& tape);

/// Vector-Jacobian product: given ∂loss/∂x_final, returns ∂loss/∂(c, A, b) of
/// the original LP. The clamp passes gradient only where it was inactive.
LpGradients backward(const UnrolledTape& tape, std::span<const double> grad_x);

/// Jacobian-vector product along (dc, dA, db), by forward-mode replay of the
/// tape. Used for the transpose test against backward().
Vector jvp(const UnrolledTape& tape, std::span<const double> dc, const Matrix& da,
           std::span<const double> db);

/// True for columns whose clamp fired (or sat within `margin` of ε) at some step.
std::vector<bool> clamp_touched(const UnrolledTape& tape, double margin = 0.0);

using LossFn = std::function<double(std::span<const double>)>;

/// Central differences of loss(solve(lp).x) on every entry of c, A and b,
/// step 1e-6·(1 + |entry|) unless `step` is given. Early stopping is forced off.
/// Entries of c that are exactly zero get gradient 0, as in backward().
LpGradients finite_diff_grad(const StandardFormLP& lp, const SolverConfig& cfg,
                             const LossFn& loss,
                             std::optional<std::span<const double>> x0 = std::nullopt,
                             std::optional<double> step = std::nullopt);

}  // namespace physarum
