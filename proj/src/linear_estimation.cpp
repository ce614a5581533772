#include "ugr/linear_estimation.hpp"

#include <cmath>

#include "ugr/errors.hpp"
#include "ugr/linalg.hpp"

namespace ugr {

BlueCoefficients blue_coefficients(const MomentTable& table) {
  const int n = table.n;
  if (n < 2)
    throw InsufficientDataError("blue_coefficients: at least two records are required");

  CholeskySolver chol(table.B, "blue_coefficients");
  const std::vector<double> ones(n, 1.0);
  const std::vector<double> u = chol.solve(ones);         // B^-1 1
  const std::vector<double> v = chol.solve(table.alpha);  // B^-1 alpha

  const double A = dot(table.alpha, v);  // alpha' B^-1 alpha
  const double D = dot(ones, u);         // 1' B^-1 1
  const double C = dot(table.alpha, u);  // alpha' B^-1 1
  const double delta = A * D - C * C;
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw ConditioningError("blue_coefficients: degenerate normal equations");

  BlueCoefficients coeffs;
  coeffs.a.resize(n);
  coeffs.b.resize(n);
  for (int i = 0; i < n; ++i) {
    coeffs.a[i] = (A * u[i] - C * v[i]) / delta;
    coeffs.b[i] = (D * v[i] - C * u[i]) / delta;
  }
  coeffs.v1 = A / delta;
  coeffs.v2 = D / delta;
  coeffs.v3 = -C / delta;
  return coeffs;
}

BluePoint blue_estimate(const RecordSeries& records, const BlueCoefficients& coeffs) {
  if (static_cast<int>(records.size()) != coeffs.n())
    throw DimensionError("blue_estimate: record count does not match coefficient length");
  return {dot(coeffs.a, records.values), dot(coeffs.b, records.values)};
}

LinearEstimates blie_from_blue(double mu_star, double sigma_star, const BlueCoefficients& coeffs) {
  const double v1 = coeffs.v1, v2 = coeffs.v2, v3 = coeffs.v3;
  const double denom = 1.0 + v2;

  LinearEstimates est;
  est.mu_blue = mu_star;
  est.sigma_blue = sigma_star;
  est.sigma_blie = sigma_star / denom;
  est.mu_blie = mu_star - v3 / denom * sigma_star;
  est.var_mu_blue = v1;
  est.var_sigma_blue = v2;
  est.cov_blue = v3;
  est.var_mu_blie = v1 - v3 * v3 * (2.0 + v2) / (denom * denom);
  est.var_sigma_blie = v2 / (denom * denom);
  est.cov_blie = v3 / (denom * denom);
  return est;
}

RelativeEfficiency relative_efficiency(const BlueCoefficients& coeffs) {
  RelativeEfficiency rec;
  rec.rec_mu = coeffs.v1 / (coeffs.v1 - coeffs.v3 * coeffs.v3 / (1.0 + coeffs.v2));
  rec.rec_sigma = 1.0 + coeffs.v2;
  return rec;
}

double blie_location_pivot_factor(const BlueCoefficients& coeffs) {
  const double denom = 1.0 + coeffs.v2;
  return std::sqrt(coeffs.v1 - coeffs.v3 * coeffs.v3 * (2.0 + coeffs.v2) / (denom * denom));
}

}  // namespace ugr
