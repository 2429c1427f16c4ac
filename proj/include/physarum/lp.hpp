#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "physarum/dense.hpp"
#include "physarum/kernels.hpp"

namespace physarum {

/// min cᵀx  s.t.  A x = b,  x ≥ 0
struct StandardFormLP {
  Matrix a;
  Vector b;
  Vector c;
  std::vector<std::string> names;  // optional, empty or one per column

  std::size_t num_rows() const noexcept { return a.rows(); }
  std::size_t num_vars() const noexcept { return a.cols(); }
};

struct SolverConfig {
  int max_iters = 10;
  double step_size = 1.0;
  double clamp_floor = 1e-8;
  /// Cost given to zero-cost columns. Unset means 1/(2√(m+n)).
  std::optional<double> gamma;
  double linsolve_tol = 1e-10;
  /// Ridge added to L, relative to trace(L)/m.
  double linsolve_reg = 1e-10;
  double residual_tol = 1e-8;
  bool early_stop = true;
  /// Upper bound M on flipped (negative-cost) coordinates; required when c has negatives.
  std::optional<double> flip_bound;
  std::uint64_t seed = 0;
  Kernel kernel = Kernel::Serial;
};

enum class SolveStatus { Converged, MaxIters, LinSolveFailure };

std::string_view to_string(SolveStatus s);

struct IterationRecord {
  int iter = 0;
  double objective = 0.0;
  double residual = 0.0;
  int linsolve_iters = 0;
  double min_x = 0.0;
};

struct SolveResult {
  Vector x;
  double objective = 0.0;
  double residual = 0.0;
  std::vector<IterationRecord> trace;
  SolveStatus status = SolveStatus::MaxIters;
};

/// Shape and finiteness checks. Returns the LP unchanged or throws.
const StandardFormLP& validate(const StandardFormLP& lp);
void validate(const SolverConfig& cfg);

double objective(const StandardFormLP& lp, std::span<const double> x);
/// ‖Ax − b‖₂; nonnegativity of x is not part of this number.
double feasibility_residual(const StandardFormLP& lp, std::span<const double> x);

}  // namespace physarum
