#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ugr/linear_estimation.hpp"
#include "ugr/pivotal_mc.hpp"
#include "ugr/prediction.hpp"
#include "ugr/record_engine.hpp"
#include "ugr/ug_distribution.hpp"

namespace ugr {

struct KsResult {
  double statistic = 0.0;
  double p_value = 0.0;
};

// One-sample two-sided Kolmogorov-Smirnov test against the two-parameter
// distribution. Exact small-sample p-value for n <= 100, asymptotic
// Kolmogorov series beyond.
KsResult ks_test(std::span<const double> data, const UgTwoParam& params);

struct ThetaCorrelation {
  double theta = 0.0;
  double correlation = 0.0;
  bool defined = true;  // false when an input is degenerate (zero variance)
};

// Pearson correlation between the observed records and the exact record
// means at each theta of the grid.
std::vector<ThetaCorrelation> theta_diagnostic(const RecordSeries& records,
                                               std::span<const double> theta_grid);

struct LabeledInterval {
  PivotId pivot;
  Interval interval;
};

struct AnalyzeOptions {
  double level = 0.95;
  std::uint64_t seed = 20240101;
  std::size_t pivot_reps = 10000;
  // round every table input to 5 decimals, matching the published reference
  // tables digit for digit (see analyze() notes)
  bool fidelity = false;
  std::vector<double> theta_grid = {0.75, 1.5, 2.5, 3.5, 4.5};
  // externally supplied quantile tables (e.g. read from a pivot cache);
  // when absent the tables are simulated with the run seed
  std::optional<std::vector<QuantileTable>> quantile_tables;
  std::optional<int> use_first_n;  // estimate from the first n records only
};

struct AnalysisReport {
  int k = 1;
  double theta = 1.0;
  double level = 0.95;
  std::uint64_t seed = 0;
  bool fidelity = false;

  RecordSeries records;       // all extracted records
  int n_used = 0;             // records used for estimation
  std::optional<MleFit> fit;  // two-parameter fit of the raw data
  std::optional<KsResult> ks;
  std::vector<ThetaCorrelation> theta_diag;
  double chosen_theta = 0.0;  // argmax correlation over the grid

  BlueCoefficients coefficients;
  LinearEstimates estimates;
  PredictionResult prediction;
  std::vector<LabeledInterval> intervals;

  // stage name -> error message for stages that failed without aborting
  std::vector<std::pair<std::string, std::string>> stage_errors;
};

// Full pipeline: extract records -> moments -> BLUE/BLIE -> BLUP/BLIP ->
// pivot tables -> six intervals, plus goodness of fit and the theta
// diagnostic on the raw data.
//
// With options.fidelity set, every moment-table input, GLS weight and
// variance factor is rounded to 5 decimals before use, so the output digits
// match a reader working from the published tables; that convention also
// takes the next-record variance from the k=1 column, as the published
// worked example does.
AnalysisReport analyze(std::span<const double> data, int k, double theta,
                       const AnalyzeOptions& options = {});

std::string report_to_json(const AnalysisReport& report);
std::string report_to_text(const AnalysisReport& report);

// Reads one observation per line; '#' lines and a non-numeric header are
// skipped. Values for the fit must parse as decimals.
std::vector<double> read_observations(const std::string& path);

}  // namespace ugr
