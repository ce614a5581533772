#pragma once

#include <vector>

#include "ugr/linalg.hpp"

namespace ugr {

// Diagnostics for the alternating sums behind the exact moment formulas.
// amplification = |largest term| / |sum|; past ~1e6 more than six decimal
// digits are lost and the value is recomputed by adaptive quadrature.
struct Conditioning {
  double amplification = 1.0;
  bool quadrature_fallback = false;
  bool degraded() const { return amplification > 1e6; }
};

// r-th single moment E[Z_{n(k)}^r] of the standardized lower k-record.
// r may be any nonnegative real, which makes the recurrence checks with
// orders r + theta expressible. Record indices are supported up to n = 30.
double single_moment(double r, int n, int k, double theta, Conditioning* cond = nullptr);

struct MeanVariance {
  double mean;
  double variance;
};
MeanVariance mean_and_variance(int n, int k, double theta);

// (r,s)-th product moment E[Z_{m(k)}^r Z_{n(k)}^s], 1 <= m < n. Falls back to
// 2-D quadrature when a denominator r - theta*(n-1-i-j) is within 1e-8 of 0.
double product_moment(double r, double s, int m, int n, int k, double theta,
                      Conditioning* cond = nullptr);

// Cov(Z_{m(k)}, Z_{n(k)}); the variance when m == n. Symmetric in (m, n).
double covariance(int m, int n, int k, double theta);

// Means vector and covariance matrix of (Z_{1(k)}, ..., Z_{n(k)}).
struct MomentTable {
  double theta = 1.0;
  int k = 1;
  int n = 1;
  std::vector<double> alpha;  // alpha[i] = E[Z_{i+1(k)}]
  Matrix B;                   // B(i,j) = Cov(Z_{i+1(k)}, Z_{j+1(k)})
};

// Builds the table and verifies positive definiteness of B.
MomentTable build_moment_table(int n, int k, double theta);

// Residual of the single-moment recurrence
//   mu_{n}^{(r+theta)} - (theta k / r)(mu_{n-1}^{(r)} - mu_{n}^{(r)}),
// both sides evaluated independently from the explicit formula.
double recurrence_residual_single(double r, int n, int k, double theta);

// Residual of the product-moment recurrence
//   mu_{m,n}^{(r,s+theta)} - (theta k / s)(mu_{m,n-1}^{(r,s)} - mu_{m,n}^{(r,s)}),
// requires n - 1 > m so that every product moment in it is defined.
double recurrence_residual_product(double r, double s, int m, int n, int k, double theta);

// Quadrature evaluations of the defining integrals (also used as fallbacks).
double single_moment_quadrature(double r, int n, int k, double theta);
double product_moment_quadrature(double r, double s, int m, int n, int k, double theta);

}  // namespace ugr
