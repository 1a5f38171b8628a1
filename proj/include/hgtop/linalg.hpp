#pragma once

// Small dense row-major matrix and a cyclic Jacobi eigensolver for symmetric
// matrices. Sized for complexes and networks of a few hundred rows.

#include <cstddef>
#include <span>
#include <vector>

namespace hgtop {

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  Matrix transposed() const;
  bool is_symmetric(double tol = 1e-12) const;

  friend Matrix operator*(const Matrix& a, const Matrix& b);
  friend Matrix operator+(const Matrix& a, const Matrix& b);
  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Eigenvalues of a symmetric matrix in ascending order. Sweeps cyclic Jacobi
/// rotations until the off-diagonal Frobenius norm drops below `tol`.
/// Throws hgtop::Error if the matrix is not square and symmetric.
std::vector<double> symmetric_eigenvalues(const Matrix& m, double tol = 1e-12);

}  // namespace hgtop
