#include "ugr/prediction.hpp"

#include <cmath>

#include "ugr/errors.hpp"
#include "ugr/linalg.hpp"

namespace ugr {
namespace {

struct SetupProjections {
  double w_inv_one;    // omega' B^-1 1
  double w_inv_alpha;  // omega' B^-1 alpha
  double w_inv_w;      // omega' B^-1 omega
  std::vector<double> inv_omega;  // B^-1 omega
};

SetupProjections project(const PredictionSetup& setup) {
  CholeskySolver chol(setup.table.B, "prediction");
  SetupProjections pr;
  pr.inv_omega = chol.solve(setup.omega);
  const std::vector<double> ones(setup.table.n, 1.0);
  pr.w_inv_one = dot(pr.inv_omega, ones);
  pr.w_inv_alpha = dot(pr.inv_omega, setup.table.alpha);
  pr.w_inv_w = dot(pr.inv_omega, setup.omega);
  return pr;
}

void check_sizes(const PredictionSetup& setup, const BlueCoefficients& coeffs) {
  if (setup.table.n < 2)
    throw InsufficientDataError("prediction: at least two records are required");
  if (static_cast<int>(setup.omega.size()) != setup.table.n)
    throw DimensionError("prediction: omega length does not match the table");
  if (coeffs.n() != setup.table.n)
    throw DimensionError("prediction: coefficient length does not match the table");
}

}  // namespace

PredictionSetup make_prediction_setup(int n, int k, double theta) {
  PredictionSetup setup;
  setup.table = build_moment_table(n, k, theta);
  setup.alpha_next = single_moment(1.0, n + 1, k, theta);
  setup.var_next = covariance(n + 1, n + 1, k, theta);
  setup.omega.resize(n);
  for (int i = 0; i < n; ++i) setup.omega[i] = covariance(i + 1, n + 1, k, theta);
  return setup;
}

double blup(const RecordSeries& records, const PredictionSetup& setup,
            const BlueCoefficients& coeffs) {
  check_sizes(setup, coeffs);
  if (static_cast<int>(records.size()) != setup.table.n)
    throw DimensionError("blup: record count does not match the table");

  const auto [mu_star, sigma_star] = blue_estimate(records, coeffs);
  const auto pr = project(setup);
  double regression = 0.0;
  for (int i = 0; i < setup.table.n; ++i) {
    regression +=
        pr.inv_omega[i] * (records.values[i] - mu_star - sigma_star * setup.table.alpha[i]);
  }
  return mu_star + setup.alpha_next * sigma_star + regression;
}

double mspe_blup(const PredictionSetup& setup, const BlueCoefficients& coeffs) {
  check_sizes(setup, coeffs);
  const auto pr = project(setup);
  const double e1 = 1.0 - pr.w_inv_one;
  const double e2 = setup.alpha_next - pr.w_inv_alpha;
  const double value = e1 * e1 * coeffs.v1 + e2 * e2 * coeffs.v2 - pr.w_inv_w +
                       2.0 * e1 * e2 * coeffs.v3 + setup.var_next;
  if (!(value > 0.0))
    throw ConditioningError("mspe_blup: nonpositive value, covariance inputs inconsistent");
  return value;
}

double v4(const PredictionSetup& setup, const BlueCoefficients& coeffs) {
  check_sizes(setup, coeffs);
  const auto pr = project(setup);
  return (1.0 - pr.w_inv_one) * coeffs.v3 + (setup.alpha_next - pr.w_inv_alpha) * coeffs.v2;
}

BlipResult blip_and_mspe(double blup_value, double sigma_star, const PredictionSetup& setup,
                         const BlueCoefficients& coeffs) {
  check_sizes(setup, coeffs);
  const auto pr = project(setup);
  const double shift = v4(setup, coeffs) / (1.0 + coeffs.v2);

  // Delta-form needs the quadratic forms of the estimation table
  CholeskySolver chol(setup.table.B, "blip");
  const std::vector<double> ones(setup.table.n, 1.0);
  const std::vector<double> u = chol.solve(ones);
  const std::vector<double> v = chol.solve(setup.table.alpha);
  const double A = dot(setup.table.alpha, v);
  const double D = dot(ones, u);
  const double C = dot(setup.table.alpha, u);
  const double delta = (A + 1.0) * D - C * C;

  const double e1 = 1.0 - pr.w_inv_one;
  const double e2 = setup.alpha_next - pr.w_inv_alpha;
  const double mspe = ((A + 1.0) / delta) * e1 * e1 + (D / delta) * e2 * e2 - pr.w_inv_w -
                      2.0 * (C / delta) * e1 * e2 + setup.var_next;
  if (!(mspe > 0.0))
    throw ConditioningError("blip_and_mspe: nonpositive value, covariance inputs inconsistent");
  return {blup_value - shift * sigma_star, mspe};
}

PredictionResult predict_next_record(const RecordSeries& records, const PredictionSetup& setup,
                                     const BlueCoefficients& coeffs, double sigma_star) {
  PredictionResult result;
  result.blup = blup(records, setup, coeffs);
  result.v4 = v4(setup, coeffs);
  result.mspe_blup = mspe_blup(setup, coeffs);
  const auto blip = blip_and_mspe(result.blup, sigma_star, setup, coeffs);
  result.blip = blip.blip;
  result.mspe_blip = blip.mspe;
  result.rec = result.mspe_blup / result.mspe_blip;
  return result;
}

}  // namespace ugr
