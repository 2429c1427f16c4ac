#pragma once

#include <optional>
#include <span>
#include <vector>

#include "physarum/lp.hpp"

namespace physarum {

/// The LP the iteration actually runs on: negative-cost columns flipped
/// (x_i = M − y_i) and zero costs raised to γ, so every cost is positive.
struct PreparedLP {
  StandardFormLP lp;
  std::vector<bool> flip_mask;
  Vector original_c;
  double gamma_applied = 0.0;
  double flip_bound = 0.0;
  /// Σ_{flipped} c_i·M, the constant separating the two objectives.
  double objective_offset = 0.0;

  /// Maps an iterate of the prepared LP back to the original coordinates.
  Vector decode(std::span<const double> y) const;
  /// Inverse of decode; throws NonPositiveInit when a coordinate leaves (0, M).
  Vector encode(std::span<const double> x) const;
};

struct PhysarumState {
  Vector x;
  int iter = 0;
};

/// Intermediate quantities of one update, kept for the reverse pass.
struct StepRecord {
  Vector x_before;
  Vector w;  // x/ĉ
  Matrix l;  // A·diag(w)·Aᵀ, without the ridge
  double reg = 0.0;  // ridge actually applied
  double reg_scale = 1.0;  // 1, or 100 after a retry
  Vector p;
  Vector q;
  Vector pre_clamp;  // (1−h)x + h·q
  int linsolve_iters = 0;
};

/// ĉ_i = γ where c_i = 0, c_i otherwise.
Vector perturb_cost(std::span<const double> c, double gamma);

/// Substitutes x_i = M − y_i for every c_i < 0. With no negative costs the
/// transform is the identity and the bound may be omitted.
PreparedLP flip_negative_costs(const StandardFormLP& lp, std::optional<double> bound);

double default_gamma(const StandardFormLP& lp);

/// flip, then perturb with cfg.gamma (or the default).
PreparedLP prepare(const StandardFormLP& lp, const SolverConfig& cfg);

/// One discretized Physarum update followed by the ε clamp.
PhysarumState physarum_step(const PreparedLP& prep, const PhysarumState& state,
                            const SolverConfig& cfg, StepRecord* record = nullptr);

/// Runs the γ-AuxPD iteration. x0, when given, is in the original coordinates
/// and need not be feasible, only strictly positive.
SolveResult solve(const StandardFormLP& lp, const SolverConfig& cfg,
                  std::optional<std::span<const double>> x0 = std::nullopt);

/// The componentwise uniform(0,1) start drawn from cfg.seed.
Vector random_start(std::size_t n, std::uint64_t seed);

}  // namespace physarum
