#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

namespace ugr {

struct StudyConfig {
  double theta = 1.5;
  int k = 1;
  int n = 4;
  std::size_t reps = 2000;
  double level = 0.95;
  std::uint64_t seed = 20240101;
  std::size_t pivot_reps = 10000;  // fresh quantile tables per (theta, k, n)
};

struct IntervalPerformance {
  double average_length = 0.0;
  double coverage = 0.0;
  std::size_t failures = 0;  // replications where the bound was undefined
};

// Aggregates over `reps` replications at standardized truth (mu=0, sigma=1):
// estimated bias and MSE of the four estimators, bias/MSPE of both
// predictors, and average length / coverage of all six intervals.
struct StudyRow {
  double theta = 0.0;
  int k = 0;
  int n = 0;
  std::size_t reps = 0;
  std::uint64_t seed = 0;

  double eb_mu_blue = 0.0, emse_mu_blue = 0.0;
  double eb_sigma_blue = 0.0, emse_sigma_blue = 0.0;
  double eb_mu_blie = 0.0, emse_mu_blie = 0.0;
  double eb_sigma_blie = 0.0, emse_sigma_blie = 0.0;
  double eb_blup = 0.0, emspe_blup = 0.0;
  double eb_blip = 0.0, emspe_blip = 0.0;

  IntervalPerformance ci_t1, ci_t3, ci_t2, ci_t4, pi_t1s, pi_t2s;
  std::size_t failed_replications = 0;
};

StudyRow run_study(const StudyConfig& config);

struct TableOptions {
  std::uint64_t seed = 20240101;
  std::size_t mc_reps = 10000;    // quantile tables
  std::size_t study_reps = 2000;  // study aggregates
  double level = 0.95;
};

// Writes a CSV with the same row/column keys as reference table `table_id`
// (1..12). Exact tables are rounded to 5 decimals; simulated tables carry
// full precision plus reps/seed columns. Returns the path written.
std::filesystem::path reproduce_table(int table_id, const std::filesystem::path& out_path,
                                      const TableOptions& options = {});

// Appends/updates the run manifest (seeds, reps, tolerances) next to the
// generated tables.
void write_table_manifest(const std::filesystem::path& dir, int table_id,
                          const std::filesystem::path& csv_path, const TableOptions& options);

}  // namespace ugr
