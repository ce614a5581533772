#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace ugr {

// Location-scale-shape parameters; support is the open interval (mu, mu+sigma).
struct UgParams {
  double mu = 0.0;
  double sigma = 1.0;
  double theta = 1.0;
};

// Two-parameter form on (0,1): f(x) = theta*alpha*x^-(theta+1) exp(-alpha(x^-theta - 1)).
struct UgTwoParam {
  double alpha = 1.0;
  double theta = 1.0;
};

void validate(const UgParams& p);
void validate(const UgTwoParam& p);

double pdf(double x, const UgParams& p);
double log_pdf(double x, const UgParams& p);  // -inf outside the support
double cdf(double x, const UgParams& p);
double quantile(double u, const UgParams& p);

double pdf(double x, const UgTwoParam& p);
double cdf(double x, const UgTwoParam& p);
double quantile(double u, const UgTwoParam& p);

// n i.i.d. draws by inverse transform; deterministic for a fixed seed
std::vector<double> sample(std::size_t n, const UgParams& p, std::uint64_t seed);
std::vector<double> sample(std::size_t n, const UgTwoParam& p, std::uint64_t seed);

double log_likelihood(std::span<const double> data, const UgTwoParam& p);

struct MleFit {
  UgTwoParam params;
  double log_likelihood = 0.0;
  double gradient_norm = 0.0;  // in (log alpha, log theta) coordinates
  int iterations = 0;
};

// Maximum likelihood fit of the two-parameter form by damped Newton iteration
// on (log alpha, log theta). Data must lie strictly inside (0,1).
MleFit fit_mle(std::span<const double> data);

}  // namespace ugr
