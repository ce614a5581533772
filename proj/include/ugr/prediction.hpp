#pragma once

#include <vector>

#include "ugr/linear_estimation.hpp"
#include "ugr/moments.hpp"
#include "ugr/record_engine.hpp"

namespace ugr {

// Everything needed to predict Z_{n+1(k)} from the first n records: the
// n-record moment table plus the mean, variance and cross-covariances of the
// next record. Always generated from the exact moment formulas at n+1.
struct PredictionSetup {
  MomentTable table;
  double alpha_next = 0.0;
  double var_next = 0.0;
  std::vector<double> omega;  // omega[i] = Cov(Z_{i+1(k)}, Z_{n+1(k)})
};

PredictionSetup make_prediction_setup(int n, int k, double theta);

struct PredictionResult {
  double blup = 0.0;
  double blip = 0.0;
  double v4 = 0.0;
  double mspe_blup = 0.0;  // units of sigma^2
  double mspe_blip = 0.0;  // units of sigma^2
  double rec = 1.0;        // mspe_blup / mspe_blip
};

// BLUP of R_{n+1(k)}:
//   mu* + alpha_{n+1} sigma* + omega' B^-1 (R - mu* 1 - sigma* alpha)
double blup(const RecordSeries& records, const PredictionSetup& setup,
            const BlueCoefficients& coeffs);

// sigma^2-normalized mean squared prediction error of the BLUP
double mspe_blup(const PredictionSetup& setup, const BlueCoefficients& coeffs);

// V4 = (1 - omega'B^-1 1) V3 + (alpha_{n+1} - omega'B^-1 alpha) V2
double v4(const PredictionSetup& setup, const BlueCoefficients& coeffs);

struct BlipResult {
  double blip;
  double mspe;  // units of sigma^2
};

// BLIP = BLUP - V4/(1+V2) sigma*, with its Delta-form MSPE where
// Delta = (alpha'B^-1 alpha + 1)(1'B^-1 1) - (alpha'B^-1 1)^2.
BlipResult blip_and_mspe(double blup_value, double sigma_star, const PredictionSetup& setup,
                         const BlueCoefficients& coeffs);

// One-call wrapper producing the full prediction report.
PredictionResult predict_next_record(const RecordSeries& records, const PredictionSetup& setup,
                                     const BlueCoefficients& coeffs, double sigma_star);

}  // namespace ugr
