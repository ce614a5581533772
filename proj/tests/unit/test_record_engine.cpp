#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "test_support.hpp"
#include "ugr/errors.hpp"
#include "ugr/record_engine.hpp"
#include "ugr/rng.hpp"

using namespace ugr;

namespace {

// brute force: k-th smallest of every prefix, emitting strict decreases
std::vector<double> brute_force_records(const std::vector<double>& data, int k) {
  std::vector<double> out;
  for (std::size_t j = k; j <= data.size(); ++j) {
    std::vector<double> prefix(data.begin(), data.begin() + j);
    std::nth_element(prefix.begin(), prefix.begin() + (k - 1), prefix.end());
    const double kth = prefix[k - 1];
    if (out.empty() || kth < out.back()) out.push_back(kth);
  }
  return out;
}

std::vector<double> covid_data() {
  return test_support::load_column(test_support::data_path("covid_andorra_positivity.csv"),
                                   "rate");
}

}  // namespace

TEST_CASE("extraction reproduces the worked positivity-rate records") {
  const auto data = covid_data();
  const RecordSeries two = extract_lower_k_records(data, 2);
  CHECK(two.values == std::vector<double>{0.2557, 0.2508, 0.2463, 0.2012, 0.1954});
  const RecordSeries one = extract_lower_k_records(data, 1);
  CHECK(one.values == std::vector<double>{0.2012, 0.1954, 0.1421});
  // first record is set once k observations have arrived
  CHECK(two.source_index.front() == 1);
  CHECK(one.source_index.front() == 0);
}

TEST_CASE("strictly decreasing input makes every value a record at k=1") {
  const std::vector<double> data{9.0, 7.5, 6.0, 2.0, 1.5};
  CHECK(extract_lower_k_records(data, 1).values == data);
}

TEST_CASE("ties never break a record") {
  const std::vector<double> data{3.0, 3.0, 2.0, 2.0, 2.0, 1.0};
  CHECK(extract_lower_k_records(data, 1).values == std::vector<double>{3.0, 2.0, 1.0});
  CHECK(extract_lower_k_records(data, 2).values == std::vector<double>{3.0, 2.0});
}

TEST_CASE("extraction argument errors") {
  CHECK_THROWS_AS(extract_lower_k_records(std::vector<double>{1.0}, 2), InsufficientDataError);
  CHECK_THROWS_AS(extract_lower_k_records(std::vector<double>{1.0, 2.0}, 0), DomainError);
}

TEST_CASE("streaming extraction equals brute-force prefix recomputation") {
  Rng rng(5150);
  for (int trial = 0; trial < 300; ++trial) {
    const int k = 1 + trial % 4;
    const std::size_t len = k + static_cast<std::size_t>(rng.uniform01() * 200);
    std::vector<double> data(len);
    for (auto& x : data) x = rng.uniform01();
    const auto streamed = extract_lower_k_records(data, k);
    CHECK(streamed.values == brute_force_records(data, k));
  }
}

TEST_CASE("records of a prefix are a prefix of the records") {
  Rng rng(31337);
  for (int trial = 0; trial < 50; ++trial) {
    const int k = 1 + trial % 3;
    std::vector<double> data(120);
    for (auto& x : data) x = rng.uniform01();
    const auto full = extract_lower_k_records(data, k);
    const std::vector<double> half(data.begin(), data.begin() + 60);
    const auto part = extract_lower_k_records(half, k);
    REQUIRE(part.size() <= full.size());
    for (std::size_t i = 0; i < part.size(); ++i) CHECK(part.values[i] == full.values[i]);
  }
}

TEST_CASE("simulated records are strictly decreasing") {
  const UgParams p{0.0, 1.0, 1.5};
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto rec = simulate_k_records(p, 2, 6, seed);
    for (std::size_t i = 1; i < rec.size(); ++i) CHECK(rec.values[i] < rec.values[i - 1]);
  }
}

TEST_CASE("simulated mean of Z_3(2) matches the exact value") {
  const UgParams p{0.0, 1.0, 1.5};
  const std::size_t reps = 1000000;
  double sum = 0.0;
  for (std::size_t i = 0; i < reps; ++i)
    sum += simulate_k_records(p, 2, 3, Rng::substream(1234, i)).values[2];
  // exact mean 0.57653, variance 0.01535
  const double se = std::sqrt(0.01535 / static_cast<double>(reps));
  CHECK(std::fabs(sum / reps - 0.57653) <= 3.0 * se);
}

TEST_CASE("gamma-arrival simulation agrees with naive stream extraction") {
  // two-sample K-S on Z_2(2), theta = 1.5, level 0.01
  const UgParams p{0.0, 1.0, 1.5};
  const std::size_t m = 20000;
  std::vector<double> direct(m), naive(m);
  for (std::size_t i = 0; i < m; ++i)
    direct[i] = simulate_k_records(p, 2, 2, Rng::substream(777, i)).values[1];
  for (std::size_t i = 0; i < m; ++i) {
    const auto stream = sample(4000, p, Rng::substream(888, i));
    const auto rec = extract_lower_k_records(stream, 2);
    REQUIRE(rec.size() >= 2);
    naive[i] = rec.values[1];
  }
  const double d = test_support::two_sample_ks_statistic(direct, naive);
  CHECK(d < test_support::two_sample_ks_critical(m, m, 0.01));
}

TEST_CASE("one record with k=1 is distributed like a plain draw") {
  const UgParams p{0.0, 1.0, 2.5};
  const std::size_t m = 100000;
  std::vector<double> via_records(m);
  for (std::size_t i = 0; i < m; ++i)
    via_records[i] = simulate_k_records(p, 1, 1, Rng::substream(91, i)).values[0];
  const auto direct = sample(m, p, 92);
  const double d = test_support::two_sample_ks_statistic(via_records, direct);
  CHECK(d < test_support::two_sample_ks_critical(m, m, 0.01));
}

TEST_CASE("joint log density reduces to the parent log density for n=1, k=1") {
  const UgParams p{0.25, 2.0, 1.5};
  RecordSeries series;
  series.k = 1;
  series.values = {1.1};
  CHECK(record_joint_log_density(series, p) ==
        doctest::Approx(log_pdf(1.1, p)).epsilon(1e-13));
}

TEST_CASE("joint density integrates to one over the ordered pair region") {
  // n = 2, k = 1, theta = 1.5: integrate over 0 < z2 < z1 < 1
  const UgParams p{0.0, 1.0, 1.5};
  auto outer = [&](double z1) {
    if (z1 <= 0.0 || z1 >= 1.0) return 0.0;
    auto inner = [&](double z2) {
      if (z2 <= 0.0 || z2 >= z1) return 0.0;
      RecordSeries series;
      series.k = 1;
      series.values = {z1, z2};
      return std::exp(record_joint_log_density(series, p));
    };
    return test_support::integrate_oracle(inner, 0.0, z1, 1e-11);
  };
  const double mass = test_support::integrate_oracle(outer, 0.0, 1.0, 1e-9);
  CHECK(std::fabs(mass - 1.0) <= 1e-6);
}

TEST_CASE("joint log density is location-scale equivariant") {
  const UgParams std_params{0.0, 1.0, 2.5};
  RecordSeries series;
  series.k = 2;
  series.values = {0.8, 0.55, 0.4};
  const double base = record_joint_log_density(series, std_params);

  const double c = 3.0, d = -1.0;
  RecordSeries moved;
  moved.k = 2;
  for (double z : series.values) moved.values.push_back(c * z + d);
  const UgParams shifted{d, c, 2.5};
  CHECK(record_joint_log_density(moved, shifted) ==
        doctest::Approx(base - series.size() * std::log(c)).epsilon(1e-12));
}

TEST_CASE("joint log density input validation") {
  const UgParams p{0.0, 1.0, 1.5};
  RecordSeries increasing;
  increasing.k = 1;
  increasing.values = {0.2, 0.4};
  CHECK_THROWS_AS(record_joint_log_density(increasing, p), DomainError);
  RecordSeries outside;
  outside.k = 1;
  outside.values = {1.4, 0.2};
  CHECK_THROWS_AS(record_joint_log_density(outside, p), DomainError);
}

TEST_CASE("marginal record density integrates to one") {
  for (int n : {1, 3}) {
    for (int k : {1, 2}) {
      const double mass = test_support::integrate_oracle(
          [&](double z) { return standardized_record_pdf(z, n, k, 1.5); }, 0.0, 1.0, 1e-12);
      INFO("n=", n, " k=", k);
      CHECK(std::fabs(mass - 1.0) <= 1e-9);
    }
  }
}
