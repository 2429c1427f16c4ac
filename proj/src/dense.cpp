#include "physarum/dense.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "physarum/error.hpp"

namespace physarum {

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw Error(ErrorCode::DimensionMismatch, "ragged matrix literal");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix id(n, n);
  for (std::size_t i = 0; i < n; ++i) id(i, i) = 1.0;
  return id;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

Vector multiply(const Matrix& a, std::span<const double> x) {
  if (x.size() != a.cols()) throw Error(ErrorCode::DimensionMismatch, "A·x");
  Vector y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
  return y;
}

Vector multiply_transposed(const Matrix& a, std::span<const double> x) {
  if (x.size() != a.rows()) throw Error(ErrorCode::DimensionMismatch, "Aᵀ·x");
  Vector y(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto r = a.row(i);
    for (std::size_t j = 0; j < a.cols(); ++j) y[j] += r[j] * x[i];
  }
  return y;
}

double trace(const Matrix& a) {
  double t = 0.0;
  for (std::size_t i = 0; i < std::min(a.rows(), a.cols()); ++i) t += a(i, i);
  return t;
}

namespace {

void check_symmetric(const Matrix& l) {
  if (l.rows() != l.cols()) throw Error(ErrorCode::DimensionMismatch, "L must be square");
  const double scale = max_abs(l.data());
  const double limit = 1e-10 * scale;
  for (std::size_t i = 0; i < l.rows(); ++i) {
    for (std::size_t j = i + 1; j < l.cols(); ++j) {
      if (std::abs(l(i, j) - l(j, i)) > limit) {
        throw Error(ErrorCode::NotSymmetric, "L(" + std::to_string(i) + "," + std::to_string(j) +
                                                 ") differs from its transpose");
      }
    }
  }
}

// Lower-triangular factor of L + reg·I, or nullopt on a non-positive pivot.
std::optional<Matrix> cholesky(const Matrix& l, double reg) {
  const std::size_t m = l.rows();
  Matrix f(m, m);
  for (std::size_t j = 0; j < m; ++j) {
    double d = l(j, j) + reg;
    for (std::size_t k = 0; k < j; ++k) d -= f(j, k) * f(j, k);
    if (!(d > 0.0) || !std::isfinite(d)) return std::nullopt;
    const double root = std::sqrt(d);
    f(j, j) = root;
    for (std::size_t i = j + 1; i < m; ++i) {
      double s = l(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= f(i, k) * f(j, k);
      f(i, j) = s / root;
    }
  }
  return f;
}

Vector cholesky_solve(const Matrix& f, std::span<const double> b) {
  const std::size_t m = f.rows();
  Vector y(b.begin(), b.end());
  for (std::size_t i = 0; i < m; ++i) {
    double s = y[i];
    for (std::size_t k = 0; k < i; ++k) s -= f(i, k) * y[k];
    y[i] = s / f(i, i);
  }
  for (std::size_t i = m; i-- > 0;) {
    double s = y[i];
    for (std::size_t k = i + 1; k < m; ++k) s -= f(k, i) * y[k];
    y[i] = s / f(i, i);
  }
  return y;
}

// r = b − (L + reg·I) p
Vector residual(const Matrix& l, double reg, std::span<const double> p, std::span<const double> b) {
  Vector r(b.begin(), b.end());
  for (std::size_t i = 0; i < l.rows(); ++i) r[i] -= dot(l.row(i), p) + reg * p[i];
  return r;
}

// ‖r‖∞ / (‖L + reg·I‖∞ ‖p‖∞ + ‖b‖∞)
double backward_error(const Matrix& l, double reg, std::span<const double> p,
                      std::span<const double> b, std::span<const double> r) {
  double l_norm = 0.0;
  for (std::size_t i = 0; i < l.rows(); ++i) {
    double row = std::abs(reg);
    for (double v : l.row(i)) row += std::abs(v);
    l_norm = std::max(l_norm, row);
  }
  const auto inf = [](std::span<const double> v) {
    double out = 0.0;
    for (double e : v) out = std::max(out, std::abs(e));
    return out;
  };
  const double scale = l_norm * inf(p) + inf(b);
  return scale > 0.0 ? inf(r) / scale : 0.0;
}

// Jacobi-preconditioned CG on (L + reg·I), warm-started from p.
int conjugate_gradient(const Matrix& l, double reg, std::span<const double> b, Vector& p,
                       double abs_tol, int max_iters) {
  const std::size_t m = l.rows();
  Vector r = residual(l, reg, p, b);
  Vector inv_diag(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double d = l(i, i) + reg;
    inv_diag[i] = d > 0.0 ? 1.0 / d : 1.0;
  }
  Vector z(m), dir(m), ld(m);
  for (std::size_t i = 0; i < m; ++i) z[i] = inv_diag[i] * r[i];
  dir = z;
  double rz = dot(r, z);
  for (int it = 0; it < max_iters; ++it) {
    if (norm2(r) <= abs_tol) return it;
    for (std::size_t i = 0; i < m; ++i) ld[i] = dot(l.row(i), dir) + reg * dir[i];
    const double curvature = dot(dir, ld);
    if (!(curvature > 0.0)) return -1;
    const double step = rz / curvature;
    for (std::size_t i = 0; i < m; ++i) {
      p[i] += step * dir[i];
      r[i] -= step * ld[i];
    }
    for (std::size_t i = 0; i < m; ++i) z[i] = inv_diag[i] * r[i];
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < m; ++i) dir[i] = z[i] + beta * dir[i];
  }
  return norm2(r) <= abs_tol ? max_iters : -1;
}

}  // namespace

SpdSolveReport spd_solve(const Matrix& l, std::span<const double> b, double tol, double reg) {
  if (l.rows() != b.size()) throw Error(ErrorCode::DimensionMismatch, "L and b disagree");
  if (!(reg >= 0.0)) throw Error(ErrorCode::InvalidArgument, "regularization must be >= 0");
  check_symmetric(l);

  const std::size_t m = l.rows();
  const double b_norm = norm2(b);
  const double denom = b_norm > 0.0 ? b_norm : 1.0;
  SpdSolveReport report;
  report.regularization_used = reg;

  if (b_norm == 0.0) {
    report.solution.assign(m, 0.0);
    return report;
  }

  Vector p(m, 0.0);
  bool have_estimate = false;
  if (m <= kDirectSolveLimit) {
    if (auto f = cholesky(l, reg)) {
      p = cholesky_solve(*f, b);
      have_estimate = true;
      // A few rounds of refinement recover accuracy lost to ill-conditioning.
      for (int round = 0; round < 3; ++round) {
        const Vector r = residual(l, reg, p, b);
        report.final_residual = norm2(r) / denom;
        if (report.final_residual <= tol) break;
        const Vector dp = cholesky_solve(*f, r);
        for (std::size_t i = 0; i < m; ++i) p[i] += dp[i];
      }
      const Vector r = residual(l, reg, p, b);
      report.final_residual = norm2(r) / denom;
      report.backward_error = backward_error(l, reg, p, b, r);
      if (std::isfinite(report.final_residual) &&
          (report.final_residual <= tol || report.backward_error <= tol)) {
        report.solution = std::move(p);
        return report;
      }
    }
  }

  if (!have_estimate || !std::isfinite(report.final_residual)) p.assign(m, 0.0);
  const int iters = conjugate_gradient(l, reg, b, p, tol * denom, static_cast<int>(10 * m));
  report.final_residual = norm2(residual(l, reg, p, b)) / denom;
  if (iters < 0 || !(report.final_residual <= tol)) {
    throw Error(ErrorCode::Breakdown, "relative residual " + std::to_string(report.final_residual) +
                                          " above tolerance; L may need more regularization");
  }
  report.iterations = std::max(iters, 1);
  report.solution = std::move(p);
  return report;
}

SpdAdjoint spd_solve_adjoint(const Matrix& l, std::span<const double> p,
                             std::span<const double> grad_p, double tol, double reg) {
  if (p.size() != l.rows() || grad_p.size() != l.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "adjoint vectors must match L");
  }
  // L is symmetric, so the transposed system is the primal one.
  SpdAdjoint out;
  out.grad_b = spd_solve(l, grad_p, tol, reg).solution;
  const std::size_t m = l.rows();
  out.grad_l = Matrix(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) out.grad_l(i, j) = -out.grad_b[i] * p[j];
  }
  return out;
}

}  // namespace physarum
