#include "ugr/ug_distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ugr/errors.hpp"
#include "ugr/rng.hpp"

namespace ugr {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void validate(const UgParams& p) {
  if (!std::isfinite(p.mu)) throw DomainError("UgParams: mu must be finite");
  if (!(p.sigma > 0.0) || !std::isfinite(p.sigma))
    throw DomainError("UgParams: sigma must be positive");
  if (!(p.theta > 0.0) || !std::isfinite(p.theta))
    throw DomainError("UgParams: theta must be positive");
}

void validate(const UgTwoParam& p) {
  if (!(p.alpha > 0.0) || !std::isfinite(p.alpha))
    throw DomainError("UgTwoParam: alpha must be positive");
  if (!(p.theta > 0.0) || !std::isfinite(p.theta))
    throw DomainError("UgTwoParam: theta must be positive");
}

double log_pdf(double x, const UgParams& p) {
  validate(p);
  const double z = (x - p.mu) / p.sigma;
  if (!(z > 0.0) || !(z < 1.0)) return -kInf;
  const double zmt = std::pow(z, -p.theta);
  return std::log(p.theta / p.sigma) - (p.theta + 1.0) * std::log(z) - (zmt - 1.0);
}

double pdf(double x, const UgParams& p) {
  const double lp = log_pdf(x, p);
  return lp == -kInf ? 0.0 : std::exp(lp);
}

double cdf(double x, const UgParams& p) {
  validate(p);
  const double z = (x - p.mu) / p.sigma;
  if (z <= 0.0) return 0.0;
  if (z >= 1.0) return 1.0;
  return std::exp(-(std::pow(z, -p.theta) - 1.0));
}

double quantile(double u, const UgParams& p) {
  validate(p);
  if (!(u > 0.0) || !(u < 1.0)) throw DomainError("quantile: u must lie in (0,1)");
  return p.mu + p.sigma * std::pow(1.0 - std::log(u), -1.0 / p.theta);
}

double pdf(double x, const UgTwoParam& p) {
  validate(p);
  if (!(x > 0.0) || !(x < 1.0)) return 0.0;
  return p.theta * p.alpha * std::pow(x, -(p.theta + 1.0)) *
         std::exp(-p.alpha * (std::pow(x, -p.theta) - 1.0));
}

double cdf(double x, const UgTwoParam& p) {
  validate(p);
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return std::exp(-p.alpha * (std::pow(x, -p.theta) - 1.0));
}

double quantile(double u, const UgTwoParam& p) {
  validate(p);
  if (!(u > 0.0) || !(u < 1.0)) throw DomainError("quantile: u must lie in (0,1)");
  return std::pow(1.0 - std::log(u) / p.alpha, -1.0 / p.theta);
}

std::vector<double> sample(std::size_t n, const UgParams& p, std::uint64_t seed) {
  validate(p);
  Rng rng(seed);
  std::vector<double> out(n);
  for (auto& x : out) x = quantile(rng.uniform01(), p);
  return out;
}

std::vector<double> sample(std::size_t n, const UgTwoParam& p, std::uint64_t seed) {
  validate(p);
  Rng rng(seed);
  std::vector<double> out(n);
  for (auto& x : out) x = quantile(rng.uniform01(), p);
  return out;
}

double log_likelihood(std::span<const double> data, const UgTwoParam& p) {
  validate(p);
  const double n = static_cast<double>(data.size());
  double sum_log = 0.0, sum_pow = 0.0;
  for (double x : data) {
    sum_log += std::log(x);
    sum_pow += std::pow(x, -p.theta) - 1.0;
  }
  return n * std::log(p.theta * p.alpha) - (p.theta + 1.0) * sum_log - p.alpha * sum_pow;
}

MleFit fit_mle(std::span<const double> data) {
  if (data.size() < 2) throw InsufficientDataError("fit_mle: need at least 2 observations");
  for (double x : data) {
    if (!(x > 0.0) || !(x < 1.0))
      throw DomainError("fit_mle: all observations must lie strictly in (0,1)");
  }
  const double n = static_cast<double>(data.size());

  // sufficient statistics for a given theta
  auto stats = [&](double theta, double& s0, double& s1, double& s2, double& lsum) {
    s0 = s1 = s2 = lsum = 0.0;
    for (double x : data) {
      const double lx = std::log(x);
      const double pw = std::exp(-theta * lx);
      s0 += pw - 1.0;
      s1 += pw * lx;
      s2 += pw * lx * lx;
      lsum += lx;
    }
  };

  // start at theta = 1 with the profile-optimal alpha
  double theta = 1.0;
  double s0, s1, s2, lsum;
  stats(theta, s0, s1, s2, lsum);
  double alpha = n / s0;

  double u = std::log(alpha), v = std::log(theta);
  double gnorm = kInf;
  int iter = 0;
  const int max_iter = 200;

  auto loglik = [&](double uu, double vv) {
    return log_likelihood(data, {std::exp(uu), std::exp(vv)});
  };
  double ll = loglik(u, v);

  for (; iter < max_iter; ++iter) {
    alpha = std::exp(u);
    theta = std::exp(v);
    stats(theta, s0, s1, s2, lsum);
    // gradient and Hessian in (u, v) = (log alpha, log theta)
    const double gu = n - alpha * s0;
    const double gv = n - theta * lsum + alpha * theta * s1;
    gnorm = std::hypot(gu, gv);
    if (gnorm <= 1e-9) break;
    const double huu = -alpha * s0;
    const double huv = alpha * theta * s1;
    const double hvv = -theta * lsum + alpha * theta * s1 - alpha * theta * theta * s2;

    // Newton step on -H, Levenberg-damped until -H is positive definite
    double lambda = 0.0;
    double du = 0.0, dv = 0.0;
    for (int t = 0; t < 60; ++t) {
      const double a11 = -huu + lambda, a12 = -huv, a22 = -hvv + lambda;
      const double det = a11 * a22 - a12 * a12;
      if (a11 > 0.0 && det > 0.0) {
        du = (a22 * gu - a12 * gv) / det;
        dv = (a11 * gv - a12 * gu) / det;
        break;
      }
      lambda = lambda == 0.0 ? 1e-4 * (std::fabs(huu) + std::fabs(hvv) + 1.0) : 10.0 * lambda;
    }

    // backtracking line search on the log-likelihood; once the gradient is
    // small the improvement drops below fp noise, so accept ties there
    double step = 1.0;
    bool accepted = false;
    for (int t = 0; t < 50; ++t) {
      const double ll_new = loglik(u + step * du, v + step * dv);
      if (std::isfinite(ll_new) &&
          (ll_new > ll || (gnorm <= 1e-5 && ll_new >= ll - 1e-10 * std::max(1.0, std::fabs(ll))))) {
        u += step * du;
        v += step * dv;
        ll = ll_new;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }

  if (!(gnorm <= 1e-8)) {
    std::ostringstream msg;
    msg << "fit_mle: no convergence after " << iter << " iterations (|grad| = " << gnorm
        << ", alpha = " << std::exp(u) << ", theta = " << std::exp(v) << ")";
    throw OptimizationError(msg.str());
  }

  MleFit fit;
  fit.params = {std::exp(u), std::exp(v)};
  fit.log_likelihood = ll;
  fit.gradient_norm = gnorm;
  fit.iterations = iter;
  return fit;
}

}  // namespace ugr
