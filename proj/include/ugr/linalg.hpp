#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace ugr {

// Dense row-major matrix. Everything in this project is tiny (n <= ~30).
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

double dot(std::span<const double> x, std::span<const double> y);

// Cholesky factorization A = L L^T of a symmetric positive definite matrix.
// Construction throws ConditioningError when a pivot is not positive; the
// context string names the offending table in the message.
class CholeskySolver {
 public:
  explicit CholeskySolver(const Matrix& spd, const std::string& context = "");

  std::vector<double> solve(std::span<const double> rhs) const;

  const Matrix& lower() const { return L_; }

 private:
  Matrix L_;
};

}  // namespace ugr
