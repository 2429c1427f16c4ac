#include "physarum/solver.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "physarum/error.hpp"
#include "solver_internal.hpp"

namespace physarum {

Vector PreparedLP::decode(std::span<const double> y) const {
  Vector x(y.begin(), y.end());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (flip_mask[i]) x[i] = flip_bound - y[i];
  }
  return x;
}

Vector PreparedLP::encode(std::span<const double> x) const {
  Vector y(x.begin(), x.end());
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (flip_mask[i]) y[i] = flip_bound - x[i];
    if (!(y[i] > 0.0)) {
      throw Error(ErrorCode::NonPositiveInit,
                  "start coordinate " + std::to_string(i) + " is not strictly inside the orthant");
    }
  }
  return y;
}

Vector perturb_cost(std::span<const double> c, double gamma) {
  Vector out(c.begin(), c.end());
  for (double& v : out) {
    if (v == 0.0) {
      if (!(gamma > 0.0)) {
        throw Error(ErrorCode::ZeroCostNeedsGamma, "cost vector has zero entries but gamma = 0");
      }
      v = gamma;
    }
  }
  return out;
}

PreparedLP flip_negative_costs(const StandardFormLP& lp, std::optional<double> bound) {
  PreparedLP prep;
  prep.lp = lp;
  prep.original_c = lp.c;
  prep.flip_mask.assign(lp.c.size(), false);
  const bool any_negative = std::any_of(lp.c.begin(), lp.c.end(), [](double v) { return v < 0.0; });
  if (!any_negative) return prep;
  if (!bound || !(*bound > 0.0)) {
    throw Error(ErrorCode::MissingBound, "negative costs need an upper bound M on x");
  }
  const double big_m = *bound;
  prep.flip_bound = big_m;
  auto& a = prep.lp.a;
  for (std::size_t j = 0; j < lp.c.size(); ++j) {
    if (lp.c[j] >= 0.0) continue;
    prep.flip_mask[j] = true;
    prep.objective_offset += lp.c[j] * big_m;
    prep.lp.c[j] = -lp.c[j];
    for (std::size_t i = 0; i < a.rows(); ++i) {
      prep.lp.b[i] -= big_m * lp.a(i, j);
      a(i, j) = -lp.a(i, j);
    }
  }
  return prep;
}

double default_gamma(const StandardFormLP& lp) {
  return 1.0 / (2.0 * std::sqrt(static_cast<double>(lp.num_rows() + lp.num_vars())));
}

PreparedLP prepare(const StandardFormLP& lp, const SolverConfig& cfg) {
  validate(lp);
  PreparedLP prep = flip_negative_costs(lp, cfg.flip_bound);
  const double gamma = cfg.gamma.value_or(default_gamma(lp));
  const bool has_zero =
      std::any_of(prep.lp.c.begin(), prep.lp.c.end(), [](double v) { return v == 0.0; });
  if (has_zero) {
    prep.lp.c = perturb_cost(prep.lp.c, gamma);
    prep.gamma_applied = gamma;
  }
  return prep;
}

PhysarumState physarum_step(const PreparedLP& prep, const PhysarumState& state,
                            const SolverConfig& cfg, StepRecord* record) {
  const auto& lp = prep.lp;
  const std::size_t n = lp.num_vars();
  if (state.x.size() != n) throw Error(ErrorCode::DimensionMismatch, "state size");

  Vector w(n);
  for (std::size_t j = 0; j < n; ++j) w[j] = state.x[j] / lp.c[j];

  Matrix l = kernels::normal_matrix(cfg.kernel, lp.a, w);
  const double tr = trace(l);
  const double base_reg =
      tr > 0.0 ? cfg.linsolve_reg * tr / static_cast<double>(l.rows()) : cfg.linsolve_reg;

  SpdSolveReport solved;
  double reg_scale = 1.0;
  try {
    solved = spd_solve(l, lp.b, cfg.linsolve_tol, base_reg);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Breakdown) throw;
    reg_scale = 100.0;
    try {
      solved = spd_solve(l, lp.b, cfg.linsolve_tol, base_reg * reg_scale);
    } catch (const Error& retry) {
      if (retry.code() != ErrorCode::Breakdown) throw;
      throw Error(ErrorCode::LinSolveFailure,
                  "iteration " + std::to_string(state.iter + 1) + ": " + retry.what());
    }
  }

  Vector q = kernels::scaled_transpose_product(cfg.kernel, lp.a, w, solved.solution);
  const double h = cfg.step_size;
  PhysarumState next;
  next.iter = state.iter + 1;
  next.x.resize(n);
  Vector pre_clamp(n);
  for (std::size_t j = 0; j < n; ++j) {
    pre_clamp[j] = (1.0 - h) * state.x[j] + h * q[j];
    next.x[j] = std::max(pre_clamp[j], cfg.clamp_floor);
  }

  if (record) {
    record->x_before = state.x;
    record->w = std::move(w);
    record->l = std::move(l);
    record->reg = base_reg * reg_scale;
    record->reg_scale = reg_scale;
    record->p = std::move(solved.solution);
    record->q = std::move(q);
    record->pre_clamp = std::move(pre_clamp);
    record->linsolve_iters = solved.iterations;
  }
  return next;
}

Vector random_start(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vector x(n);
  for (double& v : x) {
    do {
      v = unit(rng);
    } while (v <= 0.0);
  }
  return x;
}

namespace detail {

Run run_solver(const StandardFormLP& lp, const SolverConfig& cfg,
               std::optional<std::span<const double>> x0, bool early_stop,
               std::vector<StepRecord>* steps) {
  validate(cfg);
  Run run;
  run.prepared = prepare(lp, cfg);
  const auto& prep = run.prepared;
  const std::size_t n = lp.num_vars();

  PhysarumState state;
  if (x0) {
    if (x0->size() != n) throw Error(ErrorCode::DimensionMismatch, "len(x0) != n");
    for (double v : *x0) {
      if (!(v > 0.0)) throw Error(ErrorCode::NonPositiveInit, "x0 must be strictly positive");
    }
    state.x = prep.encode(*x0);
  } else {
    state.x = random_start(n, cfg.seed);
  }
  run.x_initial = state.x;

  SolveResult& result = run.result;
  bool solver_failed = false;
  for (int k = 0; k < cfg.max_iters; ++k) {
    StepRecord record;
    try {
      state = physarum_step(prep, state, cfg, &record);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::LinSolveFailure) throw;
      solver_failed = true;
      break;
    }
    const Vector x = prep.decode(state.x);
    IterationRecord rec;
    rec.iter = state.iter;
    rec.objective = dot(lp.c, x);
    rec.residual = kernels::residual_norm(cfg.kernel, lp.a, x, lp.b);
    rec.linsolve_iters = record.linsolve_iters;
    rec.min_x = *std::min_element(state.x.begin(), state.x.end());
    result.trace.push_back(rec);
    if (steps) steps->push_back(std::move(record));

    if (early_stop && rec.residual <= cfg.residual_tol && result.trace.size() >= 3) {
      const auto tail = std::span(result.trace).last(3);
      double lo = tail[0].objective, hi = tail[0].objective;
      for (const auto& t : tail) {
        lo = std::min(lo, t.objective);
        hi = std::max(hi, t.objective);
      }
      if (hi - lo <= cfg.residual_tol * std::max(1.0, std::abs(rec.objective))) break;
    }
  }

  run.x_final = state.x;
  result.x = prep.decode(state.x);
  result.objective = dot(lp.c, result.x);
  result.residual = kernels::residual_norm(cfg.kernel, lp.a, result.x, lp.b);
  if (solver_failed) {
    result.status = SolveStatus::LinSolveFailure;
  } else {
    result.status =
        result.residual <= cfg.residual_tol ? SolveStatus::Converged : SolveStatus::MaxIters;
  }
  return run;
}

}  // namespace detail

SolveResult solve(const StandardFormLP& lp, const SolverConfig& cfg,
                  std::optional<std::span<const double>> x0) {
  return detail::run_solver(lp, cfg, x0, cfg.early_stop, nullptr).result;
}

}  // namespace physarum
