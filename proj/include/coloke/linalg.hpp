#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace coloke::linalg {

// Dense row-major real matrix. Sized for the small systems used here
// (state dimension <= 64); no attempt at cache blocking or BLAS.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  const std::vector<double>& values() const { return data_; }

  Matrix transpose() const;
  Matrix operator*(const Matrix& rhs) const;
  Matrix operator+(const Matrix& rhs) const;
  Matrix operator-(const Matrix& rhs) const;
  Matrix& operator+=(const Matrix& rhs);

  std::vector<double> apply(std::span<const double> x) const;  // A*x
  double frobenius_norm() const;
  bool all_finite() const;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

Matrix outer(std::span<const double> a, std::span<const double> b);  // a b^T

// Solves A X = B by Gaussian elimination with partial pivoting.
// Throws on dimension mismatch or numerically singular A.
Matrix solve(const Matrix& A, const Matrix& B);
Matrix inverse(const Matrix& A);

struct EigenDecomposition {
  std::vector<std::complex<double>> eigenvalues;  // sorted by descending real part
  // right_eigenvectors[i] has unit norm; left_eigenvectors[i] is scaled so
  // that left^H right = 1 for the matching pair (when non-defective).
  std::vector<std::vector<std::complex<double>>> right_eigenvectors;
  std::vector<std::vector<std::complex<double>>> left_eigenvectors;
  bool is_defective = false;
};

// Full eigendecomposition of a real square matrix (dim <= 64).
// Eigenvalues via Householder reduction to Hessenberg form followed by
// Francis double-shift QR sweeps; eigenvectors by complex inverse iteration
// on the original matrix (left ones via its transpose). Complex eigenvalues
// of a real matrix come out as exact conjugate pairs.
EigenDecomposition eig(const Matrix& A);

// Least-squares reconstruction C = Z Phi^T (Phi Phi^T + rho I)^-1 used to
// map dictionary space back to state space. Z is d x n, Phi is r x n.
Matrix ridge_reconstruction(const Matrix& Z, const Matrix& Phi, double rho);

// Rank-one inverse update: given P = G^-1, returns (G + u u^T)^-1.
// Throws if the denominator 1 + u^T P u is not safely positive.
Matrix sherman_morrison_update(const Matrix& P, std::span<const double> u);

// K^j v by repeated multiplication; j = 0 returns v unchanged.
std::vector<double> mat_pow_apply(const Matrix& K, std::size_t j, std::span<const double> v);

}  // namespace coloke::linalg
