#include <cmath>

#include "physarum/error.hpp"
#include "physarum/kernels.hpp"

namespace physarum::kernels::serial {

Matrix normal_matrix(const Matrix& a, std::span<const double> w) {
  if (w.size() != a.cols()) throw Error(ErrorCode::DimensionMismatch, "len(w) != columns of A");
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  Matrix l(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto ai = a.row(i);
    for (std::size_t k = i; k < m; ++k) {
      const auto ak = a.row(k);
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += ai[j] * w[j] * ak[j];
      l(i, k) = s;
      l(k, i) = s;
    }
  }
  return l;
}

Vector scaled_transpose_product(const Matrix& a, std::span<const double> w,
                                std::span<const double> p) {
  if (w.size() != a.cols() || p.size() != a.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "diag(w)·Aᵀ·p");
  }
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  Vector q(n);
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += a(i, j) * p[i];
    q[j] = w[j] * s;
  }
  return q;
}

double residual_norm(const Matrix& a, std::span<const double> x, std::span<const double> b) {
  if (x.size() != a.cols() || b.size() != a.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "‖Ax − b‖");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto ai = a.row(i);
    double r = -b[i];
    for (std::size_t j = 0; j < a.cols(); ++j) r += ai[j] * x[j];
    s += r * r;
  }
  return std::sqrt(s);
}

}  // namespace physarum::kernels::serial
