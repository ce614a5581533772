#include <doctest.h>

#include <cmath>

#include "test_support.hpp"
#include "ugr/errors.hpp"
#include "ugr/moments.hpp"
#include "ugr/record_engine.hpp"
#include "ugr/rng.hpp"
#include "ugr/special_functions.hpp"

using namespace ugr;

TEST_CASE("zeroth moment is one") {
  CHECK(single_moment(0.0, 1, 1, 1.5) == 1.0);
  CHECK(single_moment(0.0, 6, 3, 0.75) == 1.0);
}

TEST_CASE("means match the reference values") {
  CHECK_NEAR(single_moment(1.0, 1, 1, 1.5), 0.69698, 5e-5);
  CHECK_NEAR(single_moment(1.0, 6, 3, 4.5), 0.79099, 5e-5);
  CHECK_NEAR(single_moment(1.0, 5, 2, 1.5), 0.45806, 5e-5);
}

TEST_CASE("closed form for the first draw: e * Gamma(1 - 1/theta, 1)") {
  for (double theta : {1.5, 2.5, 4.5}) {
    const double closed = std::exp(1.0) * upper_incomplete_gamma(1.0 - 1.0 / theta, 1.0);
    CHECK(single_moment(1.0, 1, 1, theta) == doctest::Approx(closed).epsilon(1e-12));
  }
}

TEST_CASE("mean and variance against reference and quadrature") {
  const auto mv = mean_and_variance(1, 1, 0.75);
  CHECK_NEAR(mv.mean, 0.51742, 5e-5);
  CHECK_NEAR(mv.variance, 0.05955, 5e-5);

  const auto mv42 = mean_and_variance(4, 2, 2.5);
  const double m1 = test_support::integrate_oracle(
      [](double z) { return z * standardized_record_pdf(z, 4, 2, 2.5); }, 0.0, 1.0);
  const double m2 = test_support::integrate_oracle(
      [](double z) { return z * z * standardized_record_pdf(z, 4, 2, 2.5); }, 0.0, 1.0);
  CHECK(mv42.mean == doctest::Approx(m1).epsilon(1e-10));
  CHECK_NEAR(mv42.variance, m2 - m1 * m1, 1e-8);
}

TEST_CASE("covariances match the reference values") {
  CHECK_NEAR(covariance(1, 2, 1, 1.5), 0.01851, 5e-5);
  CHECK_NEAR(covariance(2, 4, 2, 1.5), 0.01031, 5e-5);
  CHECK_NEAR(covariance(1, 1, 1, 0.75), 0.05955, 5e-5);
  CHECK_NEAR(covariance(3, 6, 3, 2.5), 0.00402, 5e-5);
  CHECK(covariance(4, 2, 2, 1.5) == covariance(2, 4, 2, 1.5));  // symmetric fill
}

TEST_CASE("product moment with s=0 collapses to the single moment") {
  for (int m : {1, 2, 3}) {
    for (int n : {4, 6}) {
      const double collapsed = product_moment(1.0, 0.0, m, n, 2, 1.5);
      CHECK_NEAR(collapsed, single_moment(1.0, m, 2, 1.5), 1e-9);
    }
  }
}

TEST_CASE("product moments match 2-D quadrature of the joint density") {
  struct Case { double r, s; int m, n, k; double theta; };
  for (const Case& c : {Case{1, 1, 1, 2, 1, 1.5}, Case{1, 1, 2, 4, 2, 2.5},
                        Case{2, 1, 1, 3, 3, 0.75}, Case{1, 2, 3, 5, 1, 3.5}}) {
    auto outer = [&](double y) {
      if (y <= 0.0 || y >= 1.0) return 0.0;
      auto inner = [&](double x) {
        return std::pow(x, c.r) * standardized_record_joint_pdf(x, y, c.m, c.n, c.k, c.theta);
      };
      return std::pow(y, c.s) * test_support::integrate_oracle(inner, y, 1.0, 1e-12);
    };
    const double ref = test_support::integrate_oracle(outer, 0.0, 1.0, 1e-10);
    const double got = product_moment(c.r, c.s, c.m, c.n, c.k, c.theta);
    INFO("m=", c.m, " n=", c.n, " k=", c.k, " theta=", c.theta);
    CHECK_NEAR(got, ref, 1e-7);
  }
}

TEST_CASE("moment table: monotone means, positive covariances, PD matrix") {
  const MomentTable table = build_moment_table(6, 1, 0.75);
  const double expected[] = {0.51742, 0.31010, 0.20703, 0.14937, 0.11400, 0.09067};
  for (int i = 0; i < 6; ++i) CHECK_NEAR(table.alpha[i], expected[i], 5e-5);

  for (int k : {1, 2, 3}) {
    for (double theta : {0.75, 1.5, 2.5, 3.5, 4.5}) {
      const MomentTable t = build_moment_table(6, k, theta);
      for (int i = 0; i < 6; ++i) {
        CHECK(t.alpha[i] > 0.0);
        CHECK(t.alpha[i] < 1.0);
        if (i) CHECK(t.alpha[i] < t.alpha[i - 1]);
        for (int j = 0; j < 6; ++j) CHECK(t.B(i, j) > 0.0);
      }
    }
  }

  const MomentTable t2 = build_moment_table(2, 1, 1.5);
  CHECK_NEAR(t2.B(0, 0), 0.03164, 5e-5);
  CHECK_NEAR(t2.B(0, 1), 0.01851, 5e-5);
  CHECK_NEAR(t2.B(1, 1), 0.02350, 5e-5);
}

TEST_CASE("means increase with theta and with k") {
  for (int n = 1; n <= 6; ++n) {
    for (int k : {1, 2, 3}) {
      double prev = 0.0;
      for (double theta : {0.75, 1.5, 2.5, 3.5, 4.5}) {
        const double m = single_moment(1.0, n, k, theta);
        CHECK(m > prev);
        prev = m;
      }
    }
    for (double theta : {0.75, 1.5, 2.5, 3.5, 4.5}) {
      CHECK(single_moment(1.0, n, 1, theta) < single_moment(1.0, n, 2, theta));
      CHECK(single_moment(1.0, n, 2, theta) < single_moment(1.0, n, 3, theta));
    }
  }
}

TEST_CASE("single-moment recurrence residuals vanish") {
  CHECK(std::fabs(recurrence_residual_single(1.0, 2, 1, 1.5)) <= 1e-8);
  CHECK(std::fabs(recurrence_residual_single(2.0, 4, 3, 2.5)) <= 1e-8);
  CHECK(std::fabs(recurrence_residual_single(1.0, 3, 2, 0.75)) <= 1e-8);
}

TEST_CASE("product-moment recurrence residuals vanish") {
  CHECK(std::fabs(recurrence_residual_product(1.0, 1.0, 2, 4, 1, 1.5)) <= 1e-8);
  CHECK(std::fabs(recurrence_residual_product(1.0, 2.0, 2, 5, 2, 2.5)) <= 1e-8);
}

TEST_CASE("product recurrence at r=0 reduces to the single-moment recurrence") {
  const double via_product = recurrence_residual_product(0.0, 1.0, 2, 4, 1, 1.5);
  const double via_single = recurrence_residual_single(1.0, 4, 1, 1.5);
  CHECK_NEAR(via_product, via_single, 1e-9);
}

TEST_CASE("simulation agrees with the exact mean and variance at (5,2,3.5)") {
  const UgParams p{0.0, 1.0, 3.5};
  const std::size_t reps = 1000000;
  double sum = 0.0, sumsq = 0.0;
  for (std::size_t i = 0; i < reps; ++i) {
    const double z = simulate_k_records(p, 2, 5, Rng::substream(5523, i)).values[4];
    sum += z;
    sumsq += z * z;
  }
  const auto mv = mean_and_variance(5, 2, 3.5);
  const double mean = sum / reps;
  const double var = sumsq / reps - mean * mean;
  const double se_mean = std::sqrt(mv.variance / reps);
  CHECK_NEAR(mean, mv.mean, 4.0 * se_mean);
  // SE of the sample variance ~ variance * sqrt(2/reps) with a kurtosis cushion
  CHECK_NEAR(var, mv.variance, 4.0 * 2.0 * mv.variance * std::sqrt(2.0 / reps));
}

TEST_CASE("digit-loss detector reports amplification and falls back") {
  Conditioning cond;
  single_moment(1.0, 2, 1, 1.5, &cond);
  CHECK(cond.amplification >= 1.0);
  CHECK_FALSE(cond.quadrature_fallback);

  // large k: every term carries k^(n-1) e^-k while the sum is O(1) e^-k
  // scaled down by (n-1)!, so the direct sum loses more than six digits
  const double value = single_moment(1.0, 10, 20, 1.5, &cond);
  CHECK(cond.amplification > 1e6);
  CHECK(cond.quadrature_fallback);
  CHECK_NEAR(value, 0.767707586925, 1e-8);  // high-precision reference
  const double ref = test_support::integrate_oracle(
      [](double z) { return z * standardized_record_pdf(z, 10, 20, 1.5); }, 0.0, 1.0);
  CHECK_NEAR(value, ref, 1e-7);
}

TEST_CASE("near-singular denominator triggers the quadrature fallback") {
  // r = theta*(n-1-i-j) hits zero for r=2, theta=2, m=1, n=2
  Conditioning cond;
  const double got = product_moment(2.0, 1.0, 1, 2, 1, 2.0, &cond);
  CHECK(cond.quadrature_fallback);
  auto outer = [&](double y) {
    if (y <= 0.0 || y >= 1.0) return 0.0;
    auto inner = [&](double x) {
      return x * x * standardized_record_joint_pdf(x, y, 1, 2, 1, 2.0);
    };
    return y * test_support::integrate_oracle(inner, y, 1.0, 1e-12);
  };
  const double ref = test_support::integrate_oracle(outer, 0.0, 1.0, 1e-10);
  CHECK_NEAR(got, ref, 1e-7);
}

TEST_CASE("argument validation") {
  CHECK_THROWS_AS(single_moment(-1.0, 1, 1, 1.5), DomainError);
  CHECK_THROWS_AS(single_moment(1.0, 0, 1, 1.5), DomainError);
  CHECK_THROWS_AS(single_moment(1.0, 31, 1, 1.5), DomainError);
  CHECK_THROWS_AS(single_moment(1.0, 1, 1, -1.0), DomainError);
  CHECK_THROWS_AS(product_moment(1.0, 1.0, 3, 3, 1, 1.5), DomainError);
  CHECK_THROWS_AS(product_moment(1.0, 1.0, 4, 3, 1, 1.5), DomainError);
  CHECK_THROWS_AS(recurrence_residual_single(1.0, 1, 1, 1.5), DomainError);
  CHECK_THROWS_AS(recurrence_residual_product(1.0, 1.0, 2, 3, 1, 1.5), DomainError);
}
