#pragma once

#include <array>
#include <cmath>
#include <utility>

namespace ugr {

struct QuadratureOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  int max_depth = 60;
};

namespace detail {

// Gauss-Kronrod 7-15 nodes/weights on [-1, 1]
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.0,
    0.2077849550078984676006894037732449,
    0.4058451513773971669066064120769615,
    0.5860872354676911302941448382587296,
    0.7415311855993944398638647732807884,
    0.8648644233597690727897127886409262,
    0.9491079123427585245261896840478513,
    0.9914553711208126392068546975263285};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.2094821410847278280129991748917143,
    0.2044329400752988924141619992346491,
    0.1903505780647854099132564024210137,
    0.1690047266392679028265834265985503,
    0.1406532597155259187451895905102379,
    0.1047900103222501838398763225415180,
    0.0630920926299785532907006631892042,
    0.0229353220105292249637320080589695};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.4179591836734693877551020408163265,
    0.3818300505051189449503697754889751,
    0.2797053914892766679014677714237796,
    0.1294849661688696932706114326790820};

template <class F>
std::pair<double, double> gauss_kronrod_15(F&& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fk[15];
  fk[7] = f(c);
  for (int i = 1; i < 8; ++i) {
    const double d = h * kKronrodNodes[i];
    fk[7 - i] = f(c - d);
    fk[7 + i] = f(c + d);
  }
  double kron = kKronrodWeights[0] * fk[7];
  for (int i = 1; i < 8; ++i) kron += kKronrodWeights[i] * (fk[7 - i] + fk[7 + i]);
  kron *= h;
  // embedded Gauss-7 uses the odd Kronrod nodes
  double gauss = kGaussWeights[0] * fk[7];
  for (int i = 1; i < 4; ++i) gauss += kGaussWeights[i] * (fk[7 - 2 * i] + fk[7 + 2 * i]);
  gauss *= h;
  return {kron, std::fabs(kron - gauss)};
}

template <class F>
double adaptive(F&& f, double a, double b, double tol, const QuadratureOptions& opt, int depth) {
  auto [value, err] = gauss_kronrod_15(f, a, b);
  if (err <= tol || depth >= opt.max_depth) return value;
  const double c = 0.5 * (a + b);
  return adaptive(f, a, c, 0.5 * tol, opt, depth + 1) +
         adaptive(f, c, b, 0.5 * tol, opt, depth + 1);
}

}  // namespace detail

template <class F>
double integrate(F&& f, double a, double b, QuadratureOptions opt = {}) {
  auto [rough, err0] = detail::gauss_kronrod_15(f, a, b);
  (void)err0;
  const double tol = std::max(opt.abs_tol, opt.rel_tol * std::fabs(rough));
  return detail::adaptive(f, a, b, tol, opt, 0);
}

// integral over [a, inf) via the substitution t = a + u/(1-u)
template <class F>
double integrate_upper_tail(F&& f, double a, QuadratureOptions opt = {}) {
  auto g = [&f, a](double u) {
    const double om = 1.0 - u;
    const double t = a + u / om;
    return f(t) / (om * om);
  };
  return integrate(g, 0.0, 1.0, opt);
}

}  // namespace ugr
