#include "physarum/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "physarum/error.hpp"
#include "solver_internal.hpp"

namespace physarum {

std::pair<SolveResult, UnrolledTape> solve_with_tape(const StandardFormLP& lp,
                                                     const SolverConfig& cfg,
                                                     std::optional<std::span<const double>> x0,
                                                     bool allow_early_stop) {
  UnrolledTape tape;
  tape.config = cfg;
  const bool early_stop = allow_early_stop && cfg.early_stop;
  tape.config.early_stop = early_stop;
  auto run = detail::run_solver(lp, cfg, x0, early_stop, &tape.steps);
  tape.prepared = std::move(run.prepared);
  tape.x_initial = std::move(run.x_initial);
  tape.x_final = std::move(run.x_final);
  return {std::move(run.result), std::move(tape)};
}

Vector replay(const UnrolledTape& tape) {
  PhysarumState state{tape.x_initial, 0};
  for (std::size_t k = 0; k < tape.steps.size(); ++k) {
    state = physarum_step(tape.prepared, state, tape.config);
  }
  return tape.prepared.decode(state.x);
}

std::vector<bool> clamp_touched(const UnrolledTape& tape, double margin) {
  const std::size_t n = tape.x_initial.size();
  std::vector<bool> touched(n, false);
  const double limit = tape.config.clamp_floor + margin;
  for (const auto& step : tape.steps) {
    for (std::size_t j = 0; j < n; ++j) {
      if (step.pre_clamp[j] <= limit) touched[j] = true;
    }
  }
  return touched;
}

namespace {

// Squared column norms ‖A_:j‖², the derivative of trace(A·diag(w)·Aᵀ) in w.
Vector column_norms_sq(const Matrix& a) {
  Vector out(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) out[j] += a(i, j) * a(i, j);
  }
  return out;
}

// Sensitivity of the ridge to trace(L); zero when trace(L) = 0 (ridge is then constant).
double ridge_slope(const StepRecord& step, const SolverConfig& cfg) {
  if (!(trace(step.l) > 0.0)) return 0.0;
  return step.reg_scale * cfg.linsolve_reg / static_cast<double>(step.l.rows());
}

}  // namespace

LpGradients backward(const UnrolledTape& tape, std::span<const double> grad_x) {
  const auto& prep = tape.prepared;
  const auto& a = prep.lp.a;
  const auto& c_hat = prep.lp.c;
  const auto& cfg = tape.config;
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  if (grad_x.size() != n) throw Error(ErrorCode::DimensionMismatch, "len(grad_x) != n");

  const double h = cfg.step_size;
  const Vector col_sq = column_norms_sq(a);

  Vector g(n);
  for (std::size_t j = 0; j < n; ++j) g[j] = prep.flip_mask[j] ? -grad_x[j] : grad_x[j];

  Vector g_c(n, 0.0);
  Matrix g_a(m, n);
  Vector g_b(m, 0.0);

  for (std::size_t k = tape.steps.size(); k-- > 0;) {
    const StepRecord& st = tape.steps[k];
    const Vector u = multiply_transposed(a, st.p);

    Vector g_x(n), g_w(n), g_u(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double gy = st.pre_clamp[j] > cfg.clamp_floor ? g[j] : 0.0;
      g_x[j] = (1.0 - h) * gy;
      const double gq = h * gy;
      g_w[j] = gq * u[j];
      g_u[j] = gq * st.w[j];
    }

    // u = Aᵀp
    const Vector g_p = multiply(a, g_u);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) g_a(i, j) += st.p[i] * g_u[j];
    }

    // p = (L + λI)⁻¹ b
    const SpdAdjoint adj = spd_solve_adjoint(st.l, st.p, g_p, cfg.linsolve_tol, st.reg);
    const Vector& v = adj.grad_b;
    for (std::size_t i = 0; i < m; ++i) g_b[i] += v[i];

    // L = A·diag(w)·Aᵀ with grad_L = −v pᵀ, and λ = slope·trace(L) with grad_λ = −vᵀp
    const Vector t = multiply_transposed(a, v);
    const double g_reg = -dot(v, st.p) * ridge_slope(st, cfg);
    for (std::size_t j = 0; j < n; ++j) g_w[j] += -t[j] * u[j] + g_reg * col_sq[j];
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        g_a(i, j) += -st.w[j] * (v[i] * u[j] + st.p[i] * t[j]) + 2.0 * g_reg * a(i, j) * st.w[j];
      }
    }

    // w = x/ĉ
    for (std::size_t j = 0; j < n; ++j) {
      g_x[j] += g_w[j] / c_hat[j];
      g_c[j] -= g_w[j] * st.x_before[j] / (c_hat[j] * c_hat[j]);
    }
    g = std::move(g_x);
  }

  // Undo the perturbation and the flip.
  LpGradients out;
  out.grad_c.assign(n, 0.0);
  out.grad_a = Matrix(m, n);
  out.grad_b = g_b;
  const double big_m = prep.flip_bound;
  for (std::size_t j = 0; j < n; ++j) {
    if (prep.flip_mask[j]) {
      out.grad_c[j] = -g_c[j];
      for (std::size_t i = 0; i < m; ++i) out.grad_a(i, j) = -g_a(i, j) - big_m * g_b[i];
    } else {
      out.grad_c[j] = prep.original_c[j] == 0.0 ? 0.0 : g_c[j];
      for (std::size_t i = 0; i < m; ++i) out.grad_a(i, j) = g_a(i, j);
    }
  }
  return out;
}

Vector jvp(const UnrolledTape& tape, std::span<const double> dc, const Matrix& da,
           std::span<const double> db) {
  const auto& prep = tape.prepared;
  const auto& a = prep.lp.a;
  const auto& c_hat = prep.lp.c;
  const auto& cfg = tape.config;
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  if (dc.size() != n || da.rows() != m || da.cols() != n || db.size() != m) {
    throw Error(ErrorCode::DimensionMismatch, "tangent shapes must match the LP");
  }

  // Tangents of the prepared LP.
  Vector d_chat(n);
  Matrix d_a(m, n);
  Vector d_b(db.begin(), db.end());
  for (std::size_t j = 0; j < n; ++j) {
    if (prep.flip_mask[j]) {
      d_chat[j] = -dc[j];
      for (std::size_t i = 0; i < m; ++i) {
        d_a(i, j) = -da(i, j);
        d_b[i] -= prep.flip_bound * da(i, j);
      }
    } else {
      d_chat[j] = prep.original_c[j] == 0.0 ? 0.0 : dc[j];
      for (std::size_t i = 0; i < m; ++i) d_a(i, j) = da(i, j);
    }
  }

  const double h = cfg.step_size;
  const Vector col_sq = column_norms_sq(a);
  Vector dx(n, 0.0);
  for (const StepRecord& st : tape.steps) {
    Vector dw(n);
    for (std::size_t j = 0; j < n; ++j) {
      dw[j] = dx[j] / c_hat[j] - st.x_before[j] * d_chat[j] / (c_hat[j] * c_hat[j]);
    }
    double d_reg = 0.0;
    if (const double slope = ridge_slope(st, cfg); slope != 0.0) {
      for (std::size_t j = 0; j < n; ++j) {
        double cross = 0.0;
        for (std::size_t i = 0; i < m; ++i) cross += a(i, j) * d_a(i, j);
        d_reg += dw[j] * col_sq[j] + 2.0 * st.w[j] * cross;
      }
      d_reg *= slope;
    }

    const Vector u = multiply_transposed(a, st.p);
    const Vector du_a = multiply_transposed(d_a, st.p);  // dAᵀp
    Vector wu(n), w_dau(n), dwu(n);
    for (std::size_t j = 0; j < n; ++j) {
      wu[j] = st.w[j] * u[j];
      w_dau[j] = st.w[j] * du_a[j];
      dwu[j] = dw[j] * u[j];
    }
    // dL·p = dA(w⊙u) + A(w⊙dAᵀp) + A(dw⊙u)
    const Vector t1 = multiply(d_a, wu);
    const Vector t2 = multiply(a, w_dau);
    const Vector t3 = multiply(a, dwu);
    Vector rhs(m);
    for (std::size_t i = 0; i < m; ++i) {
      rhs[i] = d_b[i] - t1[i] - t2[i] - t3[i] - d_reg * st.p[i];
    }
    const Vector dp = spd_solve(st.l, rhs, cfg.linsolve_tol, st.reg).solution;
    const Vector du_p = multiply_transposed(a, dp);

    for (std::size_t j = 0; j < n; ++j) {
      const double dq = dw[j] * u[j] + st.w[j] * (du_a[j] + du_p[j]);
      const double dy = (1.0 - h) * dx[j] + h * dq;
      dx[j] = st.pre_clamp[j] > cfg.clamp_floor ? dy : 0.0;
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (prep.flip_mask[j]) dx[j] = -dx[j];
  }
  return dx;
}

LpGradients finite_diff_grad(const StandardFormLP& lp, const SolverConfig& cfg,
                             const LossFn& loss, std::optional<std::span<const double>> x0,
                             std::optional<double> step) {
  validate(lp);
  SolverConfig fixed = cfg;
  fixed.early_stop = false;
  const std::size_t m = lp.num_rows();
  const std::size_t n = lp.num_vars();
  const std::size_t total = n + m * n + m;

  // Coordinate layout: c, then A row-major, then b.
  auto entry = [&](StandardFormLP& p, std::size_t k) -> double& {
    if (k < n) return p.c[k];
    if (k < n + m * n) return p.a.data()[k - n];
    return p.b[k - n - m * n];
  };

  std::vector<double> grads(total, 0.0);
  std::vector<int> failed(total, 0);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t idx = 0; idx < static_cast<std::int64_t>(total); ++idx) {
    const auto k = static_cast<std::size_t>(idx);
    if (k < n && lp.c[k] == 0.0) continue;  // zero costs carry no gradient, as in backward()
    StandardFormLP probe = lp;
    const double base = entry(probe, k);
    const double eta = step.value_or(1e-6 * (1.0 + std::abs(base)));
    try {
      entry(probe, k) = base + eta;
      const double up = loss(solve(probe, fixed, x0).x);
      entry(probe, k) = base - eta;
      const double down = loss(solve(probe, fixed, x0).x);
      grads[k] = (up - down) / (2.0 * eta);
    } catch (...) {
      failed[k] = 1;
    }
  }
  for (std::size_t k = 0; k < total; ++k) {
    if (failed[k]) {
      // Re-run serially so the original exception reaches the caller.
      StandardFormLP probe = lp;
      entry(probe, k) += step.value_or(1e-6 * (1.0 + std::abs(entry(probe, k))));
      (void)solve(probe, fixed, x0);
    }
  }

  LpGradients out;
  out.grad_c.assign(grads.begin(), grads.begin() + static_cast<std::ptrdiff_t>(n));
  out.grad_a = Matrix(m, n);
  std::copy(grads.begin() + static_cast<std::ptrdiff_t>(n),
            grads.begin() + static_cast<std::ptrdiff_t>(n + m * n), out.grad_a.data().begin());
  out.grad_b.assign(grads.begin() + static_cast<std::ptrdiff_t>(n + m * n), grads.end());
  return out;
}

}  // namespace physarum
