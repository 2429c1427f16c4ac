#pragma once

#include <optional>
#include <span>
#include <vector>

#include "physarum/solver.hpp"

namespace physarum::detail {

struct Run {
  PreparedLP prepared;
  Vector x_initial;  // prepared coordinates
  Vector x_final;    // prepared coordinates
  SolveResult result;
};

/// Shared driver behind solve() and solve_with_tape(); records every step
/// into `steps` when it is non-null.
Run run_solver(const StandardFormLP& lp, const SolverConfig& cfg,
               std::optional<std::span<const double>> x0, bool early_stop,
               std::vector<StepRecord>* steps);

}  // namespace physarum::detail
