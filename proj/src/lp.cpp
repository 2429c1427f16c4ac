#include "physarum/lp.hpp"

#include <cmath>
#include <string>

#include "physarum/error.hpp"

namespace physarum {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonFiniteEntry: return "NonFiniteEntry";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::Breakdown: return "Breakdown";
    case ErrorCode::ZeroCostNeedsGamma: return "ZeroCostNeedsGamma";
    case ErrorCode::MissingBound: return "MissingBound";
    case ErrorCode::NonPositiveInit: return "NonPositiveInit";
    case ErrorCode::LinSolveFailure: return "LinSolveFailure";
    case ErrorCode::KernelDegenerate: return "KernelDegenerate";
    case ErrorCode::EmptyClass: return "EmptyClass";
    case ErrorCode::Unreachable: return "Unreachable";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::InfeasibleDetected: return "InfeasibleDetected";
    case ErrorCode::UnboundedUnsupported: return "UnboundedUnsupported";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "Converged";
    case SolveStatus::MaxIters: return "MaxIters";
    case SolveStatus::LinSolveFailure: return "LinSolveFailure";
  }
  return "Unknown";
}

namespace {

bool all_finite(std::span<const double> v) {
  for (double e : v) {
    if (!std::isfinite(e)) return false;
  }
  return true;
}

}  // namespace

const StandardFormLP& validate(const StandardFormLP& lp) {
  const std::size_t m = lp.a.rows();
  const std::size_t n = lp.a.cols();
  if (m == 0 || n == 0) {
    throw Error(ErrorCode::DimensionMismatch, "A must have at least one row and one column");
  }
  if (lp.b.size() != m) {
    throw Error(ErrorCode::DimensionMismatch,
                "len(b) = " + std::to_string(lp.b.size()) + " but A has " + std::to_string(m) +
                    " rows");
  }
  if (lp.c.size() != n) {
    throw Error(ErrorCode::DimensionMismatch,
                "len(c) = " + std::to_string(lp.c.size()) + " but A has " + std::to_string(n) +
                    " columns");
  }
  if (!lp.names.empty() && lp.names.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "names must be empty or one per column");
  }
  if (!all_finite(lp.a.data())) throw Error(ErrorCode::NonFiniteEntry, "A");
  if (!all_finite(lp.b)) throw Error(ErrorCode::NonFiniteEntry, "b");
  if (!all_finite(lp.c)) throw Error(ErrorCode::NonFiniteEntry, "c");
  return lp;
}

void validate(const SolverConfig& cfg) {
  if (cfg.max_iters < 0) throw Error(ErrorCode::InvalidArgument, "max_iters must be >= 0");
  if (!(cfg.step_size > 0.0 && cfg.step_size <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "step size must lie in (0, 1]");
  }
  if (!(cfg.clamp_floor > 0.0)) throw Error(ErrorCode::InvalidArgument, "clamp floor must be > 0");
  if (cfg.gamma && !(*cfg.gamma >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "gamma must be >= 0");
  }
  if (!(cfg.linsolve_tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "linsolve_tol must be > 0");
  if (!(cfg.linsolve_reg >= 0.0)) throw Error(ErrorCode::InvalidArgument, "linsolve_reg must be >= 0");
  if (!(cfg.residual_tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "residual_tol must be > 0");
  if (cfg.flip_bound && !(*cfg.flip_bound > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "flip bound must be > 0");
  }
}

double objective(const StandardFormLP& lp, std::span<const double> x) {
  if (x.size() != lp.c.size()) {
    throw Error(ErrorCode::DimensionMismatch, "len(x) != len(c)");
  }
  return dot(lp.c, x);
}

double feasibility_residual(const StandardFormLP& lp, std::span<const double> x) {
  if (x.size() != lp.a.cols() || lp.b.size() != lp.a.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "len(x) != columns of A");
  }
  return kernels::serial::residual_norm(lp.a, x, lp.b);
}

}  // namespace physarum
