#include <cmath>
#include <cstdint>
#include <vector>

#include "physarum/error.hpp"
#include "physarum/kernels.hpp"

// Same loop bodies as kernels_serial.cpp; only the outer loops are shared out.

namespace physarum::kernels::omp {

Matrix normal_matrix(const Matrix& a, std::span<const double> w) {
  if (w.size() != a.cols()) throw Error(ErrorCode::DimensionMismatch, "len(w) != columns of A");
  const auto m = static_cast<std::int64_t>(a.rows());
  const std::size_t n = a.cols();
  Matrix l(a.rows(), a.rows());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::int64_t i = 0; i < m; ++i) {
    const auto ai = a.row(static_cast<std::size_t>(i));
    for (std::int64_t k = i; k < m; ++k) {
      const auto ak = a.row(static_cast<std::size_t>(k));
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += ai[j] * w[j] * ak[j];
      l(static_cast<std::size_t>(i), static_cast<std::size_t>(k)) = s;
      l(static_cast<std::size_t>(k), static_cast<std::size_t>(i)) = s;
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
  const auto n = static_cast<std::int64_t>(a.cols());
  Vector q(a.cols());
#pragma omp parallel for schedule(static)
  for (std::int64_t j = 0; j < n; ++j) {
    const auto col = static_cast<std::size_t>(j);
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += a(i, col) * p[i];
    q[col] = w[col] * s;
  }
  return q;
}

double residual_norm(const Matrix& a, std::span<const double> x, std::span<const double> b) {
  if (x.size() != a.cols() || b.size() != a.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "‖Ax − b‖");
  }
  const auto m = static_cast<std::int64_t>(a.rows());
  std::vector<double> sq(a.rows());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < m; ++i) {
    const auto row = static_cast<std::size_t>(i);
    const auto ai = a.row(row);
    double r = -b[row];
    for (std::size_t j = 0; j < a.cols(); ++j) r += ai[j] * x[j];
    sq[row] = r * r;
  }
  // Fixed-order reduction keeps the result identical to the serial kernel.
  double s = 0.0;
  for (double v : sq) s += v;
  return std::sqrt(s);
}

}  // namespace physarum::kernels::omp
