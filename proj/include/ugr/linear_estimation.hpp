#pragma once

#include <vector>

#include "ugr/moments.hpp"
#include "ugr/record_engine.hpp"

namespace ugr {

// Generalized least-squares weights for the BLUEs of (mu, sigma) together
// with the sigma^2-normalized variance factors
//   Var(mu*) = sigma^2 V1, Var(sigma*) = sigma^2 V2, Cov = sigma^2 V3.
struct BlueCoefficients {
  std::vector<double> a;  // location weights: mu* = sum a_i R_i
  std::vector<double> b;  // scale weights:    sigma* = sum b_i R_i
  double v1 = 0.0;
  double v2 = 0.0;
  double v3 = 0.0;

  int n() const { return static_cast<int>(a.size()); }
};

// Point estimates plus variances/covariances in units of sigma^2.
struct LinearEstimates {
  double mu_blue = 0.0;
  double sigma_blue = 0.0;
  double mu_blie = 0.0;
  double sigma_blie = 0.0;
  double var_mu_blue = 0.0;
  double var_sigma_blue = 0.0;
  double cov_blue = 0.0;
  double var_mu_blie = 0.0;
  double var_sigma_blie = 0.0;
  double cov_blie = 0.0;
};

struct RelativeEfficiency {
  double rec_mu = 1.0;     // MSE(mu*) / MSE(mu~)
  double rec_sigma = 1.0;  // MSE(sigma*) / MSE(sigma~) = 1 + V2
};

// GLS normal equations solved through one Cholesky factorization of B;
// B is never inverted explicitly. Requires table.n >= 2.
BlueCoefficients blue_coefficients(const MomentTable& table);

// dot products a'R and b'R
struct BluePoint {
  double mu_star;
  double sigma_star;
};
BluePoint blue_estimate(const RecordSeries& records, const BlueCoefficients& coeffs);

// Mann shift/scale of the BLUE:
//   sigma~ = sigma*/(1+V2),  mu~ = mu* - V3/(1+V2) sigma*.
LinearEstimates blie_from_blue(double mu_star, double sigma_star, const BlueCoefficients& coeffs);

RelativeEfficiency relative_efficiency(const BlueCoefficients& coeffs);

// Scale factor of the location pivot built from the BLIE:
// sqrt(V1 - V3^2 (2+V2) / (1+V2)^2), i.e. sqrt(Var(mu~))/sigma.
double blie_location_pivot_factor(const BlueCoefficients& coeffs);

}  // namespace ugr
