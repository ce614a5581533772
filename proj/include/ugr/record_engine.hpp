#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ugr/ug_distribution.hpp"

namespace ugr {

// A lower k-record sequence. values is strictly decreasing; source_index[i]
// is the 0-based position in the raw stream at which record i was set.
struct RecordSeries {
  int k = 1;
  std::vector<double> values;
  std::vector<std::size_t> source_index;

  std::size_t size() const { return values.size(); }
};

void validate(const RecordSeries& series);

// Streaming extraction: the first record is the k-th smallest of the first k
// observations; a new record is emitted whenever the k-th smallest value of
// the prefix strictly decreases. Only the k smallest values seen so far are
// kept. Ties never break a record.
RecordSeries extract_lower_k_records(std::span<const double> data, int k);

// Direct simulation of n lower k-records: W_1 < ... < W_n are cumulative sums
// of i.i.d. exponential(rate k) gaps, so W_j = -ln F(Z_j); records are
// Z_j = (1 + W_j)^(-1/theta) mapped through mu + sigma * z.
RecordSeries simulate_k_records(const UgParams& p, int k, int n, std::uint64_t seed);

// ln of the joint density of the first n lower k-records, including the
// -n ln(sigma) Jacobian of the location-scale transform.
double record_joint_log_density(const RecordSeries& series, const UgParams& p);

// Marginal density of the standardized n-th lower k-record Z_{n(k)}.
double standardized_record_pdf(double z, int n, int k, double theta);

// Joint density of (Z_{m(k)}, Z_{n(k)}) at (x, y), nonzero for 1 > x > y > 0.
double standardized_record_joint_pdf(double x, double y, int m, int n, int k, double theta);

}  // namespace ugr
