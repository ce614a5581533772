#include "ugr/linalg.hpp"

#include <cmath>

#include "ugr/errors.hpp"

namespace ugr {

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

CholeskySolver::CholeskySolver(const Matrix& a, const std::string& context) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw DimensionError("cholesky: matrix is not square");
  L_ = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t t = 0; t < j; ++t) d -= L_(j, t) * L_(j, t);
    if (!(d > 0.0)) {
      throw ConditioningError("cholesky: matrix not positive definite" +
                              (context.empty() ? "" : " (" + context + ")"));
    }
    L_(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t t = 0; t < j; ++t) s -= L_(i, t) * L_(j, t);
      L_(i, j) = s / L_(j, j);
    }
  }
}

std::vector<double> CholeskySolver::solve(std::span<const double> rhs) const {
  const std::size_t n = L_.rows();
  if (rhs.size() != n) throw DimensionError("cholesky solve: rhs size mismatch");
  std::vector<double> y(n), x(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = rhs[i];
    for (std::size_t t = 0; t < i; ++t) s -= L_(i, t) * y[t];
    y[i] = s / L_(i, i);
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double s = y[ii];
    for (std::size_t t = ii + 1; t < n; ++t) s -= L_(t, ii) * x[t];
    x[ii] = s / L_(ii, ii);
  }
  return x;
}

}  // namespace ugr
