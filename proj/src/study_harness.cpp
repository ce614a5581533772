#include "ugr/study_harness.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <vector>

#include <json.hpp>

#include "ugr/errors.hpp"
#include "ugr/linear_estimation.hpp"
#include "ugr/moments.hpp"
#include "ugr/pivotal_mc.hpp"
#include "ugr/prediction.hpp"
#include "ugr/record_engine.hpp"
#include "ugr/rng.hpp"

namespace ugr {
namespace {

constexpr std::array<double, 5> kThetaGrid = {0.75, 1.5, 2.5, 3.5, 4.5};
constexpr std::array<int, 3> kKGrid = {1, 2, 3};
constexpr std::array<double, 4> kTailProbs = {0.025, 0.05, 0.95, 0.975};

struct Kahan {
  double sum = 0.0, carry = 0.0;
  void add(double x) {
    const double y = x - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

struct IntervalAccum {
  Kahan length;
  std::size_t covered = 0;
  std::size_t valid = 0;
  std::size_t failures = 0;

  void add(const Interval& iv, double truth) {
    length.add(iv.upper - iv.lower);
    covered += (truth >= iv.lower && truth <= iv.upper) ? 1 : 0;
    ++valid;
  }
  IntervalPerformance finish() const {
    IntervalPerformance perf;
    perf.average_length = valid ? length.sum / static_cast<double>(valid) : 0.0;
    perf.coverage = valid ? static_cast<double>(covered) / static_cast<double>(valid) : 0.0;
    perf.failures = failures;
    return perf;
  }
};

std::string fmt5(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.5f", x);
  return buf;
}

std::string fmt_full(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string fmt_theta(double theta) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", theta);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::user, "cannot open for writing: " + path.string());
  return out;
}

}  // namespace

StudyRow run_study(const StudyConfig& config) {
  if (config.reps < 100) throw DomainError("run_study: reps must be >= 100");
  if (!(config.level > 0.0 && config.level < 1.0))
    throw DomainError("run_study: level must lie in (0,1)");

  const MomentTable table = build_moment_table(config.n, config.k, config.theta);
  const BlueCoefficients coeffs = blue_coefficients(table);
  const PredictionSetup setup = make_prediction_setup(config.n, config.k, config.theta);

  // fresh quantile tables, seed derived from the study seed
  const double gamma = 1.0 - config.level;
  const std::array<double, 2> probs = {gamma / 2.0, 1.0 - gamma / 2.0};
  const PivotSimulation pivots = simulate_pivots(config.theta, config.k, config.n,
                                                 config.pivot_reps, probs,
                                                 Rng::substream(config.seed, 0));

  Kahan eb_mu_blue, emse_mu_blue, eb_sigma_blue, emse_sigma_blue;
  Kahan eb_mu_blie, emse_mu_blie, eb_sigma_blie, emse_sigma_blie;
  Kahan eb_blup, emspe_blup, eb_blip, emspe_blip;
  IntervalAccum acc_t1, acc_t3, acc_t2, acc_t4, acc_t1s, acc_t2s;
  std::size_t failed = 0;
  std::size_t point_valid = 0;

  const UgParams standardized{0.0, 1.0, config.theta};
  for (std::size_t rep = 0; rep < config.reps; ++rep) {
    try {
      const RecordSeries full = simulate_k_records(standardized, config.k, config.n + 1,
                                                   Rng::substream(config.seed, 1 + rep));
      RecordSeries head;
      head.k = config.k;
      head.values.assign(full.values.begin(), full.values.end() - 1);
      const double target = full.values.back();

      const auto [mu_star, sigma_star] = blue_estimate(head, coeffs);
      const LinearEstimates est = blie_from_blue(mu_star, sigma_star, coeffs);
      const PredictionResult pred = predict_next_record(head, setup, coeffs, sigma_star);
      ++point_valid;

      eb_mu_blue.add(mu_star);
      emse_mu_blue.add(mu_star * mu_star);
      eb_sigma_blue.add(sigma_star - 1.0);
      emse_sigma_blue.add((sigma_star - 1.0) * (sigma_star - 1.0));
      eb_mu_blie.add(est.mu_blie);
      emse_mu_blie.add(est.mu_blie * est.mu_blie);
      eb_sigma_blie.add(est.sigma_blie - 1.0);
      emse_sigma_blie.add((est.sigma_blie - 1.0) * (est.sigma_blie - 1.0));
      eb_blup.add(pred.blup - target);
      emspe_blup.add((pred.blup - target) * (pred.blup - target));
      eb_blip.add(pred.blip - target);
      emspe_blip.add((pred.blip - target) * (pred.blip - target));

      acc_t1.add(ci_location(est, coeffs, pivots.table(PivotId::t1), config.level), 0.0);
      acc_t3.add(ci_location(est, coeffs, pivots.table(PivotId::t3), config.level), 0.0);
      try {
        acc_t2.add(ci_scale(est, coeffs, pivots.table(PivotId::t2), config.level), 1.0);
      } catch (const UndefinedBoundError&) {
        ++acc_t2.failures;
      }
      try {
        acc_t4.add(ci_scale(est, coeffs, pivots.table(PivotId::t4), config.level), 1.0);
      } catch (const UndefinedBoundError&) {
        ++acc_t4.failures;
      }
      acc_t1s.add(pi_next_record(head, sigma_star, pivots.table(PivotId::t1_star), config.level),
                  target);
      acc_t2s.add(
          pi_next_record(head, est.sigma_blie, pivots.table(PivotId::t2_star), config.level),
          target);
    } catch (const Error&) {
      ++failed;
    }
  }

  const double m = static_cast<double>(point_valid);
  StudyRow row;
  row.theta = config.theta;
  row.k = config.k;
  row.n = config.n;
  row.reps = config.reps;
  row.seed = config.seed;
  row.eb_mu_blue = eb_mu_blue.sum / m;
  row.emse_mu_blue = emse_mu_blue.sum / m;
  row.eb_sigma_blue = eb_sigma_blue.sum / m;
  row.emse_sigma_blue = emse_sigma_blue.sum / m;
  row.eb_mu_blie = eb_mu_blie.sum / m;
  row.emse_mu_blie = emse_mu_blie.sum / m;
  row.eb_sigma_blie = eb_sigma_blie.sum / m;
  row.emse_sigma_blie = emse_sigma_blie.sum / m;
  row.eb_blup = eb_blup.sum / m;
  row.emspe_blup = emspe_blup.sum / m;
  row.eb_blip = eb_blip.sum / m;
  row.emspe_blip = emspe_blip.sum / m;
  row.ci_t1 = acc_t1.finish();
  row.ci_t3 = acc_t3.finish();
  row.ci_t2 = acc_t2.finish();
  row.ci_t4 = acc_t4.finish();
  row.pi_t1s = acc_t1s.finish();
  row.pi_t2s = acc_t2s.finish();
  row.failed_replications = failed;
  return row;
}

namespace {

void write_table_1(std::ofstream& out) {
  out << "k,n,theta,mean\n";
  for (int k : kKGrid)
    for (int n = 1; n <= 6; ++n)
      for (double theta : kThetaGrid)
        out << k << "," << n << "," << fmt_theta(theta) << ","
            << fmt5(single_moment(1.0, n, k, theta)) << "\n";
}

void write_table_2(std::ofstream& out) {
  out << "k,m,n,theta,cov\n";
  for (int k : kKGrid)
    for (int m = 1; m <= 6; ++m)
      for (int n = m; n <= 6; ++n)
        for (double theta : kThetaGrid)
          out << k << "," << m << "," << n << "," << fmt_theta(theta) << ","
              << fmt5(covariance(m, n, k, theta)) << "\n";
}

void write_coefficients(std::ofstream& out, bool location) {
  out << "k,theta,n,i," << (location ? "a" : "b") << "\n";
  for (int k : kKGrid)
    for (double theta : kThetaGrid)
      for (int n = 2; n <= 6; ++n) {
        const BlueCoefficients coeffs = blue_coefficients(build_moment_table(n, k, theta));
        const auto& w = location ? coeffs.a : coeffs.b;
        for (int i = 0; i < n; ++i)
          out << k << "," << fmt_theta(theta) << "," << n << "," << (i + 1) << ","
              << fmt5(w[i]) << "\n";
      }
}

void write_table_5(std::ofstream& out) {
  out << "k,theta,n,V1,V2,V3,V4\n";
  for (int k : kKGrid)
    for (double theta : kThetaGrid)
      for (int n = 2; n <= 6; ++n) {
        const PredictionSetup setup = make_prediction_setup(n, k, theta);
        const BlueCoefficients coeffs = blue_coefficients(setup.table);
        out << k << "," << fmt_theta(theta) << "," << n << "," << fmt5(coeffs.v1) << ","
            << fmt5(coeffs.v2) << "," << fmt5(coeffs.v3) << "," << fmt5(v4(setup, coeffs))
            << "\n";
      }
}

void write_table_8(std::ofstream& out) {
  out << "k,n,theta075,theta15,theta25,theta35,theta45\n";
  for (int k : kKGrid)
    for (int n = 2; n <= 6; ++n) {
      out << k << "," << n;
      for (double theta : kThetaGrid) {
        const PredictionSetup setup = make_prediction_setup(n, k, theta);
        const BlueCoefficients coeffs = blue_coefficients(setup.table);
        const double rec = mspe_blup(setup, coeffs) /
                           blip_and_mspe(0.0, 0.0, setup, coeffs).mspe;
        out << "," << fmt5(rec);
      }
      out << "\n";
    }
}

void write_quantile_pair_table(std::ofstream& out, PivotId first, PivotId second,
                               const std::string& prefix1, const std::string& prefix2,
                               const TableOptions& options) {
  out << "k,theta,n";
  for (const auto& prefix : {prefix1, prefix2})
    for (const char* p : {"p025", "p05", "p95", "p975"}) out << "," << prefix << "_" << p;
  out << ",reps,seed\n";
  std::uint64_t row_index = 0;
  for (int k : kKGrid)
    for (double theta : kThetaGrid)
      for (int n = 2; n <= 6; ++n) {
        const std::uint64_t row_seed = Rng::substream(options.seed, row_index++);
        const PivotSimulation sim =
            simulate_pivots(theta, k, n, options.mc_reps, kTailProbs, row_seed);
        out << k << "," << fmt_theta(theta) << "," << n;
        for (PivotId id : {first, second})
          for (double q : sim.table(id).quantiles) out << "," << fmt_full(q);
        out << "," << options.mc_reps << "," << row_seed << "\n";
      }
}

void write_study_table(std::ofstream& out, int table_id, const TableOptions& options) {
  if (table_id == 10)
    out << "k,theta,n,eb_mu_blue,emse_mu_blue,eb_sigma_blue,emse_sigma_blue,"
           "eb_mu_blie,emse_mu_blie,eb_sigma_blie,emse_sigma_blie,reps,seed\n";
  else if (table_id == 11)
    out << "k,theta,n,al_t1,cp_t1,al_t3,cp_t3,al_t2,cp_t2,al_t4,cp_t4,reps,seed\n";
  else
    out << "k,theta,n,eb_blup,emspe_blup,eb_blip,emspe_blip,al_t1s,cp_t1s,al_t2s,cp_t2s,"
           "reps,seed\n";
  std::uint64_t row_index = 0;
  for (int k : kKGrid)
    for (double theta : kThetaGrid)
      for (int n = 2; n <= 6; ++n) {
        StudyConfig config;
        config.theta = theta;
        config.k = k;
        config.n = n;
        config.reps = options.study_reps;
        config.level = options.level;
        config.pivot_reps = options.mc_reps;
        config.seed = Rng::substream(options.seed, 0x51000000ull + row_index++);
        const StudyRow row = run_study(config);
        out << k << "," << fmt_theta(theta) << "," << n;
        if (table_id == 10) {
          for (double v : {row.eb_mu_blue, row.emse_mu_blue, row.eb_sigma_blue,
                           row.emse_sigma_blue, row.eb_mu_blie, row.emse_mu_blie,
                           row.eb_sigma_blie, row.emse_sigma_blie})
            out << "," << fmt_full(v);
        } else if (table_id == 11) {
          for (const IntervalPerformance* perf : {&row.ci_t1, &row.ci_t3, &row.ci_t2, &row.ci_t4})
            out << "," << fmt_full(perf->average_length) << "," << fmt_full(perf->coverage);
        } else {
          for (double v : {row.eb_blup, row.emspe_blup, row.eb_blip, row.emspe_blip})
            out << "," << fmt_full(v);
          for (const IntervalPerformance* perf : {&row.pi_t1s, &row.pi_t2s})
            out << "," << fmt_full(perf->average_length) << "," << fmt_full(perf->coverage);
        }
        out << "," << config.reps << "," << config.seed << "\n";
      }
}

}  // namespace

std::filesystem::path reproduce_table(int table_id, const std::filesystem::path& out_path,
                                      const TableOptions& options) {
  std::ofstream out = open_out(out_path);
  switch (table_id) {
    case 1: write_table_1(out); break;
    case 2: write_table_2(out); break;
    case 3: write_coefficients(out, true); break;
    case 4: write_coefficients(out, false); break;
    case 5: write_table_5(out); break;
    case 6: write_quantile_pair_table(out, PivotId::t1, PivotId::t2, "t1", "t2", options); break;
    case 7: write_quantile_pair_table(out, PivotId::t3, PivotId::t4, "t3", "t4", options); break;
    case 8: write_table_8(out); break;
    case 9:
      write_quantile_pair_table(out, PivotId::t1_star, PivotId::t2_star, "t1s", "t2s", options);
      break;
    case 10:
    case 11:
    case 12: write_study_table(out, table_id, options); break;
    default: throw DomainError("reproduce_table: table id must be 1..12");
  }
  return out_path;
}

void write_table_manifest(const std::filesystem::path& dir, int table_id,
                          const std::filesystem::path& csv_path, const TableOptions& options) {
  const std::filesystem::path manifest_path = dir / "manifest.json";
  nlohmann::json manifest;
  if (std::filesystem::exists(manifest_path)) {
    std::ifstream in(manifest_path);
    try {
      in >> manifest;
    } catch (...) {
      manifest = nlohmann::json::object();
    }
  }
  const bool simulated = table_id == 6 || table_id == 7 || table_id >= 9;
  nlohmann::json entry = {
      {"file", csv_path.filename().string()},
      {"exact", !simulated},
      {"rounding", simulated ? "full precision" : "5 decimals"},
  };
  if (simulated) {
    entry["seed"] = options.seed;
    entry["reps"] = table_id == 6 || table_id == 7 || table_id == 9 ? options.mc_reps
                                                                    : options.study_reps;
    if (table_id >= 10) {
      entry["pivot_reps"] = options.mc_reps;
      entry["level"] = options.level;
    }
  }
  manifest["table_" + std::to_string(table_id)] = entry;
  std::ofstream out = open_out(manifest_path);
  out << manifest.dump(2) << "\n";
}

}  // namespace ugr
