#include "ugr/record_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "ugr/errors.hpp"
#include "ugr/rng.hpp"
#include "ugr/special_functions.hpp"

namespace ugr {

void validate(const RecordSeries& series) {
  if (series.k < 1) throw DomainError("RecordSeries: k must be >= 1");
  if (series.values.empty()) throw DomainError("RecordSeries: empty");
  for (std::size_t i = 1; i < series.values.size(); ++i) {
    if (!(series.values[i] < series.values[i - 1]))
      throw DomainError("RecordSeries: values must be strictly decreasing");
  }
  if (!series.source_index.empty()) {
    if (series.source_index.size() != series.values.size())
      throw DimensionError("RecordSeries: source_index length mismatch");
    for (std::size_t i = 1; i < series.source_index.size(); ++i) {
      if (series.source_index[i] <= series.source_index[i - 1])
        throw DomainError("RecordSeries: source_index must be strictly increasing");
    }
  }
}

RecordSeries extract_lower_k_records(std::span<const double> data, int k) {
  if (k < 1) throw DomainError("extract_lower_k_records: k must be >= 1");
  if (data.size() < static_cast<std::size_t>(k))
    throw InsufficientDataError("extract_lower_k_records: fewer observations than k");

  RecordSeries out;
  out.k = k;
  // max-heap of the k smallest values seen so far; top() is the k-th smallest
  std::priority_queue<double> smallest;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double x = data[i];
    if (smallest.size() < static_cast<std::size_t>(k)) {
      smallest.push(x);
      if (smallest.size() == static_cast<std::size_t>(k)) {
        out.values.push_back(smallest.top());
        out.source_index.push_back(i);
      }
      continue;
    }
    if (x < smallest.top()) {
      smallest.pop();
      smallest.push(x);
      const double kth = smallest.top();
      if (kth < out.values.back()) {
        out.values.push_back(kth);
        out.source_index.push_back(i);
      }
    }
  }
  return out;
}

RecordSeries simulate_k_records(const UgParams& p, int k, int n, std::uint64_t seed) {
  validate(p);
  if (k < 1) throw DomainError("simulate_k_records: k must be >= 1");
  if (n < 1) throw DomainError("simulate_k_records: n must be >= 1");

  Rng rng(seed);
  RecordSeries out;
  out.k = k;
  out.values.reserve(n);
  double w = 0.0;
  for (int j = 0; j < n; ++j) {
    w += rng.exponential(static_cast<double>(k));
    const double z = std::pow(1.0 + w, -1.0 / p.theta);
    out.values.push_back(p.mu + p.sigma * z);
  }
  return out;
}

double record_joint_log_density(const RecordSeries& series, const UgParams& p) {
  validate(series);
  validate(p);
  const int n = static_cast<int>(series.size());
  const int k = series.k;

  double sum = 0.0;
  double z_last = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = (series.values[i] - p.mu) / p.sigma;
    if (!(z > 0.0) || !(z < 1.0))
      throw DomainError("record_joint_log_density: record outside the support");
    const UgParams std_params{0.0, 1.0, p.theta};
    const double lf = log_pdf(z, std_params);
    const double lF = -(std::pow(z, -p.theta) - 1.0);  // ln F(z)
    sum += lf - lF;
    z_last = z;
  }
  const double lF_last = -(std::pow(z_last, -p.theta) - 1.0);
  return n * std::log(static_cast<double>(k)) + k * lF_last + sum -
         n * std::log(p.sigma);
}

double standardized_record_pdf(double z, int n, int k, double theta) {
  if (n < 1 || k < 1) throw DomainError("standardized_record_pdf: n, k must be >= 1");
  if (!(theta > 0.0)) throw DomainError("standardized_record_pdf: theta must be positive");
  if (!(z > 0.0) || !(z >= std::numeric_limits<double>::min()) || z >= 1.0) return 0.0;
  const UgParams std_params{0.0, 1.0, theta};
  const double w = std::pow(z, -theta) - 1.0;  // -ln F(z)
  if (!std::isfinite(w)) return 0.0;
  const double logv = n * std::log(static_cast<double>(k)) - log_factorial(n - 1) +
                      (n - 1) * std::log(w) - (k - 1) * w + log_pdf(z, std_params);
  return std::isfinite(logv) ? std::exp(logv) : 0.0;
}

double standardized_record_joint_pdf(double x, double y, int m, int n, int k, double theta) {
  if (!(1 <= m && m < n)) throw DomainError("standardized_record_joint_pdf: need 1 <= m < n");
  if (k < 1 || !(theta > 0.0)) throw DomainError("standardized_record_joint_pdf: bad k or theta");
  if (!(y > 0.0) || !(y < x) || !(x < 1.0)) return 0.0;
  const UgParams std_params{0.0, 1.0, theta};
  const double wx = std::pow(x, -theta) - 1.0;  // -ln F(x)
  const double wy = std::pow(y, -theta) - 1.0;
  if (!std::isfinite(wx) || !std::isfinite(wy)) return 0.0;
  // ln f(x)/F(x) = ln(theta) - (theta+1) ln x
  const double log_hazard_x = std::log(theta) - (theta + 1.0) * std::log(x);
  const double logv = n * std::log(static_cast<double>(k)) - log_factorial(m - 1) -
                      log_factorial(n - m - 1) + (m - 1) * std::log(wx) + log_hazard_x +
                      (n - m - 1) * std::log(wy - wx) - (k - 1) * wy + log_pdf(y, std_params);
  return std::isfinite(logv) ? std::exp(logv) : 0.0;
}

}  // namespace ugr
