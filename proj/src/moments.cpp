#include "ugr/moments.hpp"

#include <cmath>
#include <sstream>

#include "ugr/errors.hpp"
#include "ugr/quadrature.hpp"
#include "ugr/record_engine.hpp"
#include "ugr/special_functions.hpp"

namespace ugr {
namespace {

void check_args(double r, int n, int k, double theta) {
  if (!(r >= 0.0) || !std::isfinite(r)) throw DomainError("moment order r must be >= 0");
  if (n < 1 || n > 30) throw DomainError("moments: n must lie in 1..30");
  if (k < 1) throw DomainError("moments: k must be >= 1");
  if (!(theta > 0.0) || !std::isfinite(theta)) throw DomainError("moments: theta must be positive");
}

// Kahan-compensated accumulator
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;
  double largest = 0.0;
  void add(double term) {
    largest = std::max(largest, std::fabs(term));
    const double y = term - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

}  // namespace

double single_moment_quadrature(double r, int n, int k, double theta) {
  auto f = [=](double z) {
    return std::pow(z, r) * standardized_record_pdf(z, n, k, theta);
  };
  return integrate(f, 0.0, 1.0, {1e-12, 1e-12, 60});
}

double product_moment_quadrature(double r, double s, int m, int n, int k, double theta) {
  // E[Z_m^r Z_n^s] = \int_0^1 y^s \int_y^1 x^r f_{m,n}(x,y) dx dy
  auto outer = [=](double y) {
    if (!(y > 0.0) || !(y < 1.0)) return 0.0;
    auto inner = [=](double x) {
      return std::pow(x, r) * standardized_record_joint_pdf(x, y, m, n, k, theta);
    };
    return std::pow(y, s) * integrate(inner, y, 1.0, {1e-13, 1e-11, 48});
  };
  return integrate(outer, 0.0, 1.0, {1e-12, 1e-10, 48});
}

double single_moment(double r, int n, int k, double theta, Conditioning* cond) {
  check_args(r, n, k, theta);
  if (cond) *cond = {};
  if (r == 0.0) return 1.0;

  const double rt = r / theta;
  CompensatedSum acc;
  for (int i = 0; i < n; ++i) {
    const double mag = binomial_coefficient(n - 1, i) *
                       std::pow(static_cast<double>(k), n + rt - i - 1) *
                       upper_incomplete_gamma(i - rt + 1.0, static_cast<double>(k));
    acc.add(((n - i - 1) % 2 == 0 ? 1.0 : -1.0) * mag);
  }
  const double value = std::exp(k - log_factorial(n - 1)) * acc.sum;

  const double amplification = acc.largest / std::max(std::fabs(acc.sum), 1e-300);
  if (cond) cond->amplification = amplification;
  if (amplification > 1e6) {
    if (cond) cond->quadrature_fallback = true;
    return single_moment_quadrature(r, n, k, theta);
  }
  return value;
}

MeanVariance mean_and_variance(int n, int k, double theta) {
  const double mean = single_moment(1.0, n, k, theta);
  const double variance = single_moment(2.0, n, k, theta) - mean * mean;
  return {mean, variance};
}

double product_moment(double r, double s, int m, int n, int k, double theta, Conditioning* cond) {
  check_args(r, n, k, theta);
  if (!(s >= 0.0) || !std::isfinite(s)) throw DomainError("moment order s must be >= 0");
  if (!(1 <= m && m < n)) throw DomainError("product_moment: need 1 <= m < n");
  if (cond) *cond = {};

  const double kk = static_cast<double>(k);
  CompensatedSum acc;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n - m; ++j) {
      const double den = r - theta * (n - 1 - i - j);
      if (std::fabs(den) < 1e-8) {
        // removable singularity of the closed form; integrate instead
        if (cond) cond->quadrature_fallback = true;
        return product_moment_quadrature(r, s, m, n, k, theta);
      }
      const double c = binomial_coefficient(m - 1, i) * binomial_coefficient(n - m - 1, j);
      const double sign = ((n - m - 1 - j + i) % 2 == 0) ? 1.0 : -1.0;
      const double t1 =
          upper_incomplete_gamma(j - s / theta + 1.0, kk) * std::pow(kk, -(j - s / theta));
      const double t2 = upper_incomplete_gamma(n - (s + r) / theta - i, kk) *
                        std::pow(kk, -(n - i - 1.0 - (s + r) / theta));
      acc.add(sign * c / den * (t1 - t2));
    }
  }
  const double value =
      theta * std::pow(kk, n - 1.0) *
      std::exp(kk - log_factorial(m - 1) - log_factorial(n - m - 1)) * acc.sum;

  const double amplification = acc.largest / std::max(std::fabs(acc.sum), 1e-300);
  if (cond) cond->amplification = amplification;
  if (amplification > 1e6) {
    if (cond) cond->quadrature_fallback = true;
    return product_moment_quadrature(r, s, m, n, k, theta);
  }
  return value;
}

double covariance(int m, int n, int k, double theta) {
  if (m > n) std::swap(m, n);
  if (m < 1) throw DomainError("covariance: indices must be >= 1");
  if (m == n) return mean_and_variance(n, k, theta).variance;
  return product_moment(1.0, 1.0, m, n, k, theta) -
         single_moment(1.0, m, k, theta) * single_moment(1.0, n, k, theta);
}

MomentTable build_moment_table(int n, int k, double theta) {
  check_args(0.0, n, k, theta);
  MomentTable table;
  table.theta = theta;
  table.k = k;
  table.n = n;
  table.alpha.resize(n);
  table.B = Matrix(n, n);
  for (int i = 0; i < n; ++i) table.alpha[i] = single_moment(1.0, i + 1, k, theta);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const double c = covariance(i + 1, j + 1, k, theta);
      table.B(i, j) = c;
      table.B(j, i) = c;
    }
  }
  // PD check; failure names the offending table
  std::ostringstream ctx;
  ctx << "moment table n=" << n << " k=" << k << " theta=" << theta;
  CholeskySolver{table.B, ctx.str()};
  return table;
}

double recurrence_residual_single(double r, int n, int k, double theta) {
  if (n <= 1) throw DomainError("recurrence_residual_single: requires n > 1");
  if (!(r > 0.0)) throw DomainError("recurrence_residual_single: requires r > 0");
  const double lhs = single_moment(r + theta, n, k, theta);
  const double rhs = theta * k / r *
                     (single_moment(r, n - 1, k, theta) - single_moment(r, n, k, theta));
  return lhs - rhs;
}

double recurrence_residual_product(double r, double s, int m, int n, int k, double theta) {
  if (!(n - 1 > m && m > 1))
    throw DomainError("recurrence_residual_product: requires n - 1 > m > 1");
  if (!(s > 0.0)) throw DomainError("recurrence_residual_product: requires s > 0");
  const double lhs = product_moment(r, s + theta, m, n, k, theta);
  const double rhs = theta * k / s *
                     (product_moment(r, s, m, n - 1, k, theta) - product_moment(r, s, m, n, k, theta));
  return lhs - rhs;
}

}  // namespace ugr
