#include <doctest.h>

#include <cmath>

#include "test_support.hpp"
#include "ugr/errors.hpp"
#include "ugr/special_functions.hpp"

using ugr::upper_incomplete_gamma;

TEST_CASE("upper incomplete gamma at order 1 is exp(-x)") {
  CHECK(upper_incomplete_gamma(1.0, 2.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
  CHECK(upper_incomplete_gamma(1.0, 0.25) == doctest::Approx(std::exp(-0.25)).epsilon(1e-12));
}

TEST_CASE("small x limit recovers the complete gamma function") {
  // Gamma(0.5) = sqrt(pi)
  CHECK(upper_incomplete_gamma(0.5, 1e-13) ==
        doctest::Approx(std::sqrt(M_PI)).epsilon(1e-6));
  CHECK(upper_incomplete_gamma(3.0, 1e-10) == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("negative non-integer order matches the quadrature oracle") {
  const double got = upper_incomplete_gamma(-1.0 / 3.0, 1.0);
  const double ref = test_support::upper_gamma_oracle(-1.0 / 3.0, 1.0);
  CHECK(std::fabs(got - ref) <= 1e-10 * std::fabs(ref));
}

TEST_CASE("accuracy sweep against quadrature over orders and arguments") {
  for (double a : {-8.0, -5.5, -2.25, -1.0, -1.0 / 3.0, 0.0, 0.4, 1.0, 2.5, 7.0}) {
    for (double x : {0.05, 0.3, 0.8, 1.0, 2.0, 5.0, 20.0}) {
      const double got = upper_incomplete_gamma(a, x);
      const double ref = test_support::upper_gamma_oracle(a, x);
      INFO("a=", a, " x=", x, " got=", got, " ref=", ref);
      CHECK(std::fabs(got - ref) <= 1e-10 * std::fabs(ref));
    }
  }
}

TEST_CASE("gamma recurrence Gamma(a+1,x) = a Gamma(a,x) + x^a e^-x") {
  for (double a : {-5.5, -1.0 / 3.0, 0.5, 3.0}) {
    for (double x : {0.5, 1.0, 2.0, 3.0}) {
      const double lhs = upper_incomplete_gamma(a + 1.0, x);
      const double term = std::exp(a * std::log(x) - x);
      const double rhs = a * upper_incomplete_gamma(a, x) + term;
      const double scale = std::max({std::fabs(lhs), std::fabs(rhs), term});
      INFO("a=", a, " x=", x);
      CHECK(std::fabs(lhs - rhs) <= 1e-10 * scale);
    }
  }
}

TEST_CASE("order near zero and integer orders stay accurate") {
  for (double a : {0.0, -1.0, -3.0, -1e-5, -2.0 + 1e-7}) {
    for (double x : {0.2, 0.7, 1.5, 4.0}) {
      const double got = upper_incomplete_gamma(a, x);
      const double ref = test_support::upper_gamma_oracle(a, x);
      INFO("a=", a, " x=", x);
      CHECK(std::fabs(got - ref) <= 1e-9 * std::fabs(ref));
    }
  }
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(upper_incomplete_gamma(1.0, 0.0), ugr::DomainError);
  CHECK_THROWS_AS(upper_incomplete_gamma(1.0, -2.0), ugr::DomainError);
  CHECK_THROWS_AS(upper_incomplete_gamma(std::nan(""), 1.0), ugr::DomainError);
}

TEST_CASE("binomial coefficients are exact for small n") {
  CHECK(ugr::binomial_coefficient(20, 10) == 184756.0);
  CHECK(ugr::binomial_coefficient(5, 0) == 1.0);
  CHECK(ugr::binomial_coefficient(5, 6) == 0.0);
  CHECK(ugr::binomial_coefficient(29, 13) == doctest::Approx(67863915.0).epsilon(1e-12));
}
