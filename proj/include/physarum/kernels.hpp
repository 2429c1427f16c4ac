#pragma once

#include <span>

#include "physarum/dense.hpp"

// Data-parallel inner loops of the Physarum iteration. The serial versions
// are the reference; the OpenMP versions split the same loops across threads
// without changing any summation order, so both produce bit-identical output.

namespace physarum {

enum class Kernel { Serial, Parallel };

namespace kernels::serial {

/// L = A·diag(w)·Aᵀ
Matrix normal_matrix(const Matrix& a, std::span<const double> w);
/// q = diag(w)·Aᵀ·p
Vector scaled_transpose_product(const Matrix& a, std::span<const double> w,
                                std::span<const double> p);
/// ‖A x − b‖₂
double residual_norm(const Matrix& a, std::span<const double> x, std::span<const double> b);

}  // namespace kernels::serial

namespace kernels::omp {

Matrix normal_matrix(const Matrix& a, std::span<const double> w);
Vector scaled_transpose_product(const Matrix& a, std::span<const double> w,
                                std::span<const double> p);
double residual_norm(const Matrix& a, std::span<const double> x, std::span<const double> b);

}  // namespace kernels::omp

namespace kernels {

inline Matrix normal_matrix(Kernel k, const Matrix& a, std::span<const double> w) {
  return k == Kernel::Parallel ? omp::normal_matrix(a, w) : serial::normal_matrix(a, w);
}

inline Vector scaled_transpose_product(Kernel k, const Matrix& a, std::span<const double> w,
                                       std::span<const double> p) {
  return k == Kernel::Parallel ? omp::scaled_transpose_product(a, w, p)
                               : serial::scaled_transpose_product(a, w, p);
}

inline double residual_norm(Kernel k, const Matrix& a, std::span<const double> x,
                            std::span<const double> b) {
  return k == Kernel::Parallel ? omp::residual_norm(a, x, b) : serial::residual_norm(a, x, b);
}

}  // namespace kernels
}  // namespace physarum
