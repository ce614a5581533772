#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "ugr/linear_estimation.hpp"
#include "ugr/record_engine.hpp"

namespace ugr {

// The six pivotal quantities whose simulated percentage points drive the
// confidence and prediction intervals:
//   T1 = (mu* - mu)/(sigma* sqrt(V1))        T2 = (sigma* - sigma)/(sigma sqrt(V2))
//   T3, T4: the BLIE-scaled counterparts
//   T1* = (R_{n+1} - R_n)/sigma*             T2* = (R_{n+1} - R_n)/sigma~
enum class PivotId { t1, t2, t3, t4, t1_star, t2_star };

inline constexpr std::array<PivotId, 6> kAllPivots = {
    PivotId::t1, PivotId::t2, PivotId::t3, PivotId::t4, PivotId::t1_star, PivotId::t2_star};

std::string pivot_name(PivotId id);          // "T1" ... "T2star"
PivotId pivot_from_name(const std::string&);  // accepts T1/t1/T1star/T1*

struct QuantileTable {
  PivotId pivot = PivotId::t1;
  double theta = 1.0;
  int k = 1;
  int n = 2;
  std::size_t reps = 0;
  std::vector<double> probs;
  std::vector<double> quantiles;
  std::uint64_t seed = 0;
  std::size_t nonpositive_sigma_count = 0;

  // throws MissingQuantileError when p is not one of probs
  double quantile_at(double p) const;
};

// All six pivots simulated from one shared replication stream, so pivot pairs
// related by exact algebra (T3 affine in T1, T4 = T2 - sqrt(V2),
// T2* = (1+V2) T1*) stay consistent replication by replication.
struct PivotSimulation {
  std::array<QuantileTable, 6> tables;              // indexed like kAllPivots
  std::array<std::vector<double>, 6> samples;       // raw per-replication values
  std::size_t nonpositive_sigma_count = 0;

  const QuantileTable& table(PivotId id) const {
    return tables[static_cast<std::size_t>(id)];
  }
};

// Simulates `reps` standardized record samples of length n+1 (the extra one
// is the prediction-pivot target). Degenerate replications with sigma* <= 0
// are retained and counted, never resampled. Deterministic per seed and
// independent of evaluation order (per-replication substreams).
PivotSimulation simulate_pivots(double theta, int k, int n, std::size_t reps,
                                std::span<const double> probs, std::uint64_t seed);

QuantileTable simulate_pivot_quantiles(PivotId id, double theta, int k, int n, std::size_t reps,
                                       std::span<const double> probs, std::uint64_t seed);

// Type-7 quantile (linear interpolation between order statistics).
double quantile_type7(std::span<const double> sorted, double p);

enum class IntervalTarget { mu, sigma, next_record };

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
  double level = 0.0;
  IntervalTarget target = IntervalTarget::mu;
  // scale intervals are canonically ordered; the raw formula-order bounds
  // are retained here
  double raw_lower = 0.0;
  double raw_upper = 0.0;
};

// CI for mu from T1 (BLUE scaling) or T3 (BLIE scaling).
Interval ci_location(const LinearEstimates& estimates, const BlueCoefficients& coeffs,
                     const QuantileTable& table, double level);

// CI for sigma from T2 or T4; bounds sigma^/(1 + f T(p)) are canonicalized to
// (min, max). A nonpositive denominator raises UndefinedBoundError carrying
// the offending quantile.
Interval ci_scale(const LinearEstimates& estimates, const BlueCoefficients& coeffs,
                  const QuantileTable& table, double level);

// PI for the next record: [R_n + sigma^ T*(g/2), R_n + sigma^ T*(1-g/2)].
Interval pi_next_record(const RecordSeries& records, double sigma_estimate,
                        const QuantileTable& table, double level);

// cache layout: <dir>/<pivot>_<k>_<theta>_<n>.csv
std::filesystem::path quantile_table_path(const std::filesystem::path& dir, PivotId id, int k,
                                          double theta, int n);
void write_quantile_table_csv(const QuantileTable& table, const std::filesystem::path& path);
QuantileTable read_quantile_table_csv(const std::filesystem::path& path);

}  // namespace ugr
