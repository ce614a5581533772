#include "cli_app.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ugr/data_analysis.hpp"
#include "ugr/errors.hpp"
#include "ugr/linear_estimation.hpp"
#include "ugr/moments.hpp"
#include "ugr/pivotal_mc.hpp"
#include "ugr/prediction.hpp"
#include "ugr/record_engine.hpp"
#include "ugr/rng.hpp"
#include "ugr/study_harness.hpp"
#include "ugr/ug_distribution.hpp"

namespace ugr::cli {
namespace {

std::string fmt6(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

std::ostream& sink(std::ostream& out, std::ofstream& file, const std::string& path) {
  if (path.empty()) return out;
  file.open(path);
  if (!file) throw Error(ErrorKind::user, "cannot open for writing: " + path);
  return file;
}

struct CommonFlags {
  double theta = 1.5;
  int k = 1;
  int n = 4;
  double r = 1.0;
  std::size_t reps = 10000;
  std::uint64_t seed = 20240101;
  double level = 0.95;
  std::string input;
  std::string out;
  std::string format = "csv";
};

void cmd_moments(const CommonFlags& f, std::optional<double> r_flag, std::ostream& out_stream) {
  std::ofstream file;
  std::ostream& os = sink(out_stream, file, f.out);
  if (f.format == "json") {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 1; i <= f.n; ++i) {
      const auto mv = mean_and_variance(i, f.k, f.theta);
      nlohmann::json row = {{"n", i}, {"mean", mv.mean}, {"variance", mv.variance}};
      if (r_flag) row["moment_r"] = single_moment(*r_flag, i, f.k, f.theta);
      rows.push_back(row);
    }
    os << nlohmann::json{{"theta", f.theta}, {"k", f.k}, {"rows", rows}}.dump(2) << "\n";
    return;
  }
  os << "n,mean,variance";
  if (r_flag) os << ",moment_r";
  os << "\n";
  for (int i = 1; i <= f.n; ++i) {
    const auto mv = mean_and_variance(i, f.k, f.theta);
    os << i << "," << fmt6(mv.mean) << "," << fmt6(mv.variance);
    if (r_flag) os << "," << fmt6(single_moment(*r_flag, i, f.k, f.theta));
    os << "\n";
  }
}

void cmd_coeffs(const CommonFlags& f, std::ostream& out_stream) {
  const PredictionSetup setup = make_prediction_setup(f.n, f.k, f.theta);
  const BlueCoefficients coeffs = blue_coefficients(setup.table);
  const double v4_value = v4(setup, coeffs);
  std::ofstream file;
  std::ostream& os = sink(out_stream, file, f.out);
  if (f.format == "json") {
    os << nlohmann::json{{"theta", f.theta}, {"k", f.k},  {"n", f.n},
                         {"a", coeffs.a},    {"b", coeffs.b},
                         {"V1", coeffs.v1},  {"V2", coeffs.v2},
                         {"V3", coeffs.v3},  {"V4", v4_value}}
              .dump(2)
       << "\n";
    return;
  }
  os << "i,a,b,V1,V2,V3,V4\n";
  for (int i = 0; i < f.n; ++i) {
    os << (i + 1) << "," << fmt6(coeffs.a[i]) << "," << fmt6(coeffs.b[i]) << ","
       << fmt6(coeffs.v1) << "," << fmt6(coeffs.v2) << "," << fmt6(coeffs.v3) << ","
       << fmt6(v4_value) << "\n";
  }
}

nlohmann::json estimates_to_json(const LinearEstimates& est) {
  return {{"mu_blue", est.mu_blue},
          {"sigma_blue", est.sigma_blue},
          {"mu_blie", est.mu_blie},
          {"sigma_blie", est.sigma_blie},
          {"var_mu_blue", est.var_mu_blue},
          {"var_sigma_blue", est.var_sigma_blue},
          {"cov_blue", est.cov_blue},
          {"var_mu_blie", est.var_mu_blie},
          {"var_sigma_blie", est.var_sigma_blie},
          {"cov_blie", est.cov_blie}};
}

struct EstimationRun {
  RecordSeries used;
  BlueCoefficients coeffs;
  LinearEstimates estimates;
};

EstimationRun run_estimation(const CommonFlags& f, bool n_given) {
  const std::vector<double> data = read_observations(f.input);
  const RecordSeries records = extract_lower_k_records(data, f.k);
  const int n = n_given ? f.n : static_cast<int>(records.size());
  if (static_cast<int>(records.size()) < n || n < 2)
    throw InsufficientDataError("estimate: need at least 2 extracted records");
  EstimationRun run;
  run.used.k = f.k;
  run.used.values.assign(records.values.begin(), records.values.begin() + n);
  run.coeffs = blue_coefficients(build_moment_table(n, f.k, f.theta));
  const auto [mu_star, sigma_star] = blue_estimate(run.used, run.coeffs);
  run.estimates = blie_from_blue(mu_star, sigma_star, run.coeffs);
  return run;
}

void cmd_estimate(const CommonFlags& f, bool n_given, std::ostream& out_stream) {
  const EstimationRun run = run_estimation(f, n_given);
  std::ofstream file;
  std::ostream& os = sink(out_stream, file, f.out);
  if (f.format == "json") {
    os << nlohmann::json{{"records", run.used.values},
                         {"n", run.used.size()},
                         {"estimates", estimates_to_json(run.estimates)}}
              .dump(2)
       << "\n";
    return;
  }
  os << "quantity,value\n";
  os << "mu_blue," << fmt6(run.estimates.mu_blue) << "\n";
  os << "sigma_blue," << fmt6(run.estimates.sigma_blue) << "\n";
  os << "mu_blie," << fmt6(run.estimates.mu_blie) << "\n";
  os << "sigma_blie," << fmt6(run.estimates.sigma_blie) << "\n";
}

void cmd_predict(const CommonFlags& f, bool n_given, std::ostream& out_stream) {
  const EstimationRun run = run_estimation(f, n_given);
  const int n = static_cast<int>(run.used.size());
  const PredictionSetup setup = make_prediction_setup(n, f.k, f.theta);
  const PredictionResult pred =
      predict_next_record(run.used, setup, run.coeffs, run.estimates.sigma_blue);
  std::ofstream file;
  std::ostream& os = sink(out_stream, file, f.out);
  if (f.format == "json") {
    os << nlohmann::json{{"estimates", estimates_to_json(run.estimates)},
                         {"blup", pred.blup},
                         {"blip", pred.blip},
                         {"V4", pred.v4},
                         {"mspe_blup_sigma2", pred.mspe_blup},
                         {"mspe_blip_sigma2", pred.mspe_blip},
                         {"mspe_blup_data_units",
                          pred.mspe_blup * run.estimates.sigma_blue * run.estimates.sigma_blue},
                         {"mspe_blip_data_units",
                          pred.mspe_blip * run.estimates.sigma_blie * run.estimates.sigma_blie},
                         {"rec", pred.rec}}
              .dump(2)
       << "\n";
    return;
  }
  os << "quantity,value\n";
  os << "blup," << fmt6(pred.blup) << "\n";
  os << "blip," << fmt6(pred.blip) << "\n";
  os << "V4," << fmt6(pred.v4) << "\n";
  os << "mspe_blup_sigma2," << fmt6(pred.mspe_blup) << "\n";
  os << "mspe_blip_sigma2," << fmt6(pred.mspe_blip) << "\n";
  os << "rec," << fmt6(pred.rec) << "\n";
}

void cmd_pivots(const CommonFlags& f, const std::string& pivot, const std::string& out_dir,
                std::vector<double> probs, std::ostream& out_stream) {
  if (probs.empty()) probs = {0.025, 0.05, 0.95, 0.975};
  const PivotSimulation sim = simulate_pivots(f.theta, f.k, f.n, f.reps, probs, f.seed);
  const std::filesystem::path dir = out_dir.empty() ? "pivots" : out_dir;
  std::filesystem::create_directories(dir);
  std::vector<PivotId> wanted;
  if (pivot == "all") {
    wanted.assign(kAllPivots.begin(), kAllPivots.end());
  } else {
    wanted.push_back(pivot_from_name(pivot));
  }
  for (PivotId id : wanted) {
    const auto path = quantile_table_path(dir, id, f.k, f.theta, f.n);
    write_quantile_table_csv(sim.table(id), path);
    out_stream << "wrote " << path.string() << "\n";
  }
}

void cmd_study(const CommonFlags& f, std::size_t pivot_reps, std::ostream& out_stream) {
  StudyConfig config;
  config.theta = f.theta;
  config.k = f.k;
  config.n = f.n;
  config.reps = f.reps;
  config.level = f.level;
  config.seed = f.seed;
  config.pivot_reps = pivot_reps;
  const StudyRow row = run_study(config);
  std::ofstream file;
  std::ostream& os = sink(out_stream, file, f.out);
  nlohmann::json j = {
      {"theta", row.theta},
      {"k", row.k},
      {"n", row.n},
      {"reps", row.reps},
      {"seed", row.seed},
      {"eb_mu_blue", row.eb_mu_blue},
      {"emse_mu_blue", row.emse_mu_blue},
      {"eb_sigma_blue", row.eb_sigma_blue},
      {"emse_sigma_blue", row.emse_sigma_blue},
      {"eb_mu_blie", row.eb_mu_blie},
      {"emse_mu_blie", row.emse_mu_blie},
      {"eb_sigma_blie", row.eb_sigma_blie},
      {"emse_sigma_blie", row.emse_sigma_blie},
      {"eb_blup", row.eb_blup},
      {"emspe_blup", row.emspe_blup},
      {"eb_blip", row.eb_blip},
      {"emspe_blip", row.emspe_blip},
      {"failed_replications", row.failed_replications},
  };
  auto interval_json = [](const IntervalPerformance& perf) {
    return nlohmann::json{{"average_length", perf.average_length},
                          {"coverage", perf.coverage},
                          {"failures", perf.failures}};
  };
  j["ci_t1"] = interval_json(row.ci_t1);
  j["ci_t3"] = interval_json(row.ci_t3);
  j["ci_t2"] = interval_json(row.ci_t2);
  j["ci_t4"] = interval_json(row.ci_t4);
  j["pi_t1star"] = interval_json(row.pi_t1s);
  j["pi_t2star"] = interval_json(row.pi_t2s);
  os << j.dump(2) << "\n";
}

void cmd_analyze(const CommonFlags& f, bool n_given, bool fidelity, const std::string& pivots_dir,
                 std::ostream& out_stream) {
  const std::vector<double> data = read_observations(f.input);
  AnalyzeOptions options;
  options.level = f.level;
  options.seed = f.seed;
  options.pivot_reps = f.reps;
  options.fidelity = fidelity;
  if (n_given) options.use_first_n = f.n;
  if (!pivots_dir.empty()) {
    std::vector<QuantileTable> tables;
    const RecordSeries records = extract_lower_k_records(data, f.k);
    const int n = n_given ? f.n : static_cast<int>(records.size());
    for (PivotId id : kAllPivots) {
      const auto path = quantile_table_path(pivots_dir, id, f.k, f.theta, n);
      if (std::filesystem::exists(path)) tables.push_back(read_quantile_table_csv(path));
    }
    if (!tables.empty()) options.quantile_tables = tables;
  }
  const AnalysisReport report = analyze(data, f.k, f.theta, options);
  std::ofstream file;
  std::ostream& os = sink(out_stream, file, f.out);
  if (f.format == "text") {
    os << report_to_text(report);
  } else {
    os << report_to_json(report) << "\n";
  }
}

void cmd_tables(int id, const CommonFlags& f, std::size_t study_reps, std::ostream& out_stream) {
  TableOptions options;
  options.seed = f.seed;
  options.mc_reps = f.reps;
  options.study_reps = study_reps;
  options.level = f.level;
  const std::filesystem::path out_path =
      f.out.empty() ? std::filesystem::path("tables") / ("table_" + std::to_string(id) + ".csv")
                    : std::filesystem::path(f.out);
  reproduce_table(id, out_path, options);
  write_table_manifest(out_path.has_parent_path() ? out_path.parent_path() : ".", id, out_path,
                       options);
  out_stream << "wrote " << out_path.string() << "\n";
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Moments, linear estimation, prediction and Monte Carlo intervals "
               "for lower k-records from the unit-Gompertz distribution"};
  app.require_subcommand(1);

  CommonFlags f;
  std::optional<double> r_flag;
  bool fidelity = false;
  std::string pivot = "all";
  std::string pivots_dir;
  std::string out_dir;
  std::vector<double> probs;
  std::size_t study_reps = 2000;
  int table_id = 1;

  auto add_common = [&](CLI::App* cmd, bool needs_input) {
    cmd->add_option("--theta", f.theta, "shape parameter");
    cmd->add_option("--k", f.k, "record order k");
    cmd->add_option("--seed", f.seed, "random seed");
    cmd->add_option("--level", f.level, "interval level");
    cmd->add_option("--reps", f.reps, "Monte Carlo replications");
    cmd->add_option("--out", f.out, "output file (default stdout)");
    cmd->add_option("--format", f.format, "csv, json or text")
        ->check(CLI::IsMember({"csv", "json", "text"}));
    if (needs_input)
      cmd->add_option("--input", f.input, "observations, one per line")->required();
  };

  auto* moments_cmd = app.add_subcommand("moments", "exact record means/variances");
  add_common(moments_cmd, false);
  moments_cmd->add_option("--n", f.n, "number of records");
  moments_cmd->add_option("--r", r_flag, "additionally report the r-th moment");

  auto* coeffs_cmd = app.add_subcommand("coeffs", "BLUE weights and variance factors");
  add_common(coeffs_cmd, false);
  coeffs_cmd->add_option("--n", f.n, "number of records");

  auto* estimate_cmd = app.add_subcommand("estimate", "BLUE/BLIE of (mu, sigma)");
  add_common(estimate_cmd, true);
  auto* estimate_n = estimate_cmd->add_option("--n", f.n, "use first n records");

  auto* predict_cmd = app.add_subcommand("predict", "BLUP/BLIP of the next record");
  add_common(predict_cmd, true);
  auto* predict_n = predict_cmd->add_option("--n", f.n, "use first n records");

  auto* pivots_cmd = app.add_subcommand("pivots", "simulate pivot quantile tables");
  add_common(pivots_cmd, false);
  pivots_cmd->add_option("--n", f.n, "number of records");
  pivots_cmd->add_option("--pivot", pivot, "T1,T2,T3,T4,T1star,T2star or all");
  pivots_cmd->add_option("--out-dir", out_dir, "cache directory (default pivots/)");
  pivots_cmd->add_option("--probs", probs, "probabilities (default 0.025 0.05 0.95 0.975)");

  auto* study_cmd = app.add_subcommand("study", "bias/MSE/coverage simulation study");
  add_common(study_cmd, false);
  study_cmd->add_option("--n", f.n, "number of records");
  std::size_t pivot_reps = 10000;
  study_cmd->add_option("--pivot-reps", pivot_reps, "replications for the quantile tables");

  auto* analyze_cmd = app.add_subcommand("analyze", "full record analysis of a data set");
  add_common(analyze_cmd, true);
  auto* analyze_n = analyze_cmd->add_option("--n", f.n, "use first n records");
  analyze_cmd->add_flag("--paper-fidelity", fidelity,
                        "round table inputs to 5 decimals (match published tables)");
  analyze_cmd->add_option("--pivots-dir", pivots_dir, "read cached quantile tables from here");

  auto* tables_cmd = app.add_subcommand("tables", "regenerate a reference table");
  add_common(tables_cmd, false);
  tables_cmd->add_option("--id", table_id, "table id 1..12")->required();
  tables_cmd->add_option("--study-reps", study_reps, "replications for study tables");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      // --help and friends
      out << app.help();
      return 0;
    }
    err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    if (moments_cmd->parsed()) cmd_moments(f, r_flag, out);
    else if (coeffs_cmd->parsed()) cmd_coeffs(f, out);
    else if (estimate_cmd->parsed()) cmd_estimate(f, estimate_n->count() > 0, out);
    else if (predict_cmd->parsed()) cmd_predict(f, predict_n->count() > 0, out);
    else if (pivots_cmd->parsed()) cmd_pivots(f, pivot, out_dir, probs, out);
    else if (study_cmd->parsed()) cmd_study(f, pivot_reps, out);
    else if (analyze_cmd->parsed())
      cmd_analyze(f, analyze_n->count() > 0, fidelity, pivots_dir, out);
    else if (tables_cmd->parsed()) cmd_tables(table_id, f, study_reps, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace ugr::cli
