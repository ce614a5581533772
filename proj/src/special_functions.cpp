#include "ugr/special_functions.hpp"

#include <cmath>
#include <cstdint>
#include <limits>

#include "ugr/errors.hpp"

namespace ugr {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;

// Continued fraction for Gamma(a,x) (modified Lentz). Converges for x > 0 and
// any real a; used when x >= a+1 and for all a <= 0 with x >= 1.
double gamma_cf(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / (b != 0.0 ? b : kTiny);
  double h = d;
  for (int i = 1; i <= 20000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) <= kEps) {
      return std::exp(-x + a * std::log(x)) * h;
    }
  }
  throw ConditioningError("upper_incomplete_gamma: continued fraction failed to converge");
}

// Gamma(a,x) = Gamma(a) - lower(a,x) via the lower-integral power series;
// requires a > 0 and is used when x < a+1 (no destructive cancellation there).
double gamma_series_complement(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 20000; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * kEps) {
      const double lower = sum * std::exp(-x + a * std::log(x));
      return std::exp(std::lgamma(a)) - lower;
    }
  }
  throw ConditioningError("upper_incomplete_gamma: series failed to converge");
}

// Gamma(a,x) for |a| small (|a| <= 0.35) and x < 1, valid at a = 0 where it
// reduces to the exponential integral E1(x). Splits off the 1/a poles of
// Gamma(a) and x^a/a so the a -> 0 limit is taken analytically:
//   Gamma(a,x) = (Gamma(1+a)-1)/a - expm1(a ln x)/a - x^a * sum_{n>=1} (-x)^n/(n! (a+n))
double gamma_small_order(double a, double x) {
  const double lx = std::log(x);
  const double g1 = a != 0.0 ? std::expm1(std::lgamma(1.0 + a)) / a
                             : -0.57721566490153286060651209008240243;
  const double g2 = a != 0.0 ? -std::expm1(a * lx) / a : -lx;
  double sum = 0.0;
  double pow_term = 1.0;  // (-x)^n / n!
  for (int n = 1; n <= 400; ++n) {
    pow_term *= -x / n;
    const double del = pow_term / (a + n);
    sum += del;
    if (std::fabs(del) < kEps * std::fabs(sum) + kTiny) break;
  }
  return g1 + g2 - std::exp(a * lx) * sum;
}

}  // namespace

double upper_incomplete_gamma(double a, double x) {
  if (!(x > 0.0)) throw DomainError("upper_incomplete_gamma: requires x > 0");
  if (!std::isfinite(a)) throw DomainError("upper_incomplete_gamma: order must be finite");

  if (a > 0.0) {
    return x < a + 1.0 ? gamma_series_complement(a, x) : gamma_cf(a, x);
  }
  if (x >= 1.0) return gamma_cf(a, x);

  // a <= 0, x < 1: recurrence Gamma(a,x) = (Gamma(a+1,x) - x^a e^-x)/a walked
  // down from an anchor order in [-0.35, 0.65). Every divisor on the way down
  // has magnitude >= 0.35, anchors at or near zero use the small-order
  // series, positive anchors the power series, so no step cancels
  // catastrophically.
  const int m = static_cast<int>(std::ceil(-a - 0.35));
  const double anchor = a + m;
  double g = anchor > 0.35 ? gamma_series_complement(anchor, x) : gamma_small_order(anchor, x);
  for (int j = m - 1; j >= 0; --j) {
    const double aj = a + j;
    g = (g - std::exp(aj * std::log(x) - x)) / aj;
  }
  return g;
}

double binomial_coefficient(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  if (n <= 20) {
    std::uint64_t num = 1;
    for (int i = 0; i < std::min(k, n - k); ++i) {
      num = num * static_cast<std::uint64_t>(n - i) / static_cast<std::uint64_t>(i + 1);
    }
    return static_cast<double>(num);
  }
  return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
}

double log_factorial(int n) { return std::lgamma(n + 1.0); }

}  // namespace ugr
