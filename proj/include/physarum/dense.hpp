#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace physarum {

using Vector = std::vector<double>;

/// Row-major dense matrix. Problem sizes here are a few hundred rows at most.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double max_abs(std::span<const double> a);

/// y = A x
Vector multiply(const Matrix& a, std::span<const double> x);
/// y = Aᵀ x
Vector multiply_transposed(const Matrix& a, std::span<const double> x);

double trace(const Matrix& a);

/// Outcome of a regularized symmetric solve (L + λI) p = b.
struct SpdSolveReport {
  Vector solution;
  /// Conjugate-gradient steps taken; 0 when the Cholesky path succeeded.
  int iterations = 0;
  /// ‖(L+λI)p − b‖₂ / ‖b‖₂ (absolute residual when b = 0).
  double final_residual = 0.0;
  double regularization_used = 0.0;
  /// Normwise backward error ‖r‖∞ / (‖L+λI‖∞‖p‖∞ + ‖b‖∞) of the direct solve.
  double backward_error = 0.0;
};

/// Systems up to this many rows are factorized directly; larger ones use CG.
inline constexpr std::size_t kDirectSolveLimit = 512;

/// Solves (L + reg·I) p = b for symmetric positive (semi)definite L.
///
/// Throws NotSymmetric when L deviates from symmetry by more than 1e-10
/// relative to its largest entry, and Breakdown when neither the factorization
/// nor CG (10·m steps) succeeds. A factored solve is accepted when either
/// ‖(L+λI)p − b‖ ≤ tol·‖b‖ or its backward error is ≤ tol; CG needs the former.
SpdSolveReport spd_solve(const Matrix& l, std::span<const double> b, double tol, double reg);

struct SpdAdjoint {
  Matrix grad_l;
  Vector grad_b;
};

/// Reverse-mode rule for p = (L+λI)⁻¹b: grad_b = (L+λI)⁻ᵀ grad_p and
/// grad_L = −grad_b ⊗ p.
SpdAdjoint spd_solve_adjoint(const Matrix& l, std::span<const double> p,
                             std::span<const double> grad_p, double tol, double reg);

}  // namespace physarum
