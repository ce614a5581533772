#include "ugr/data_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ugr/errors.hpp"
#include "ugr/moments.hpp"
#include "ugr/rng.hpp"

namespace ugr {
namespace {

// P(D_n < d) for the one-sample two-sided statistic, exact for moderate n
// (Marsaglia/Tsang/Wang matrix-power method).
double ks_cdf_exact(int n, double d) {
  const double t = n * d;
  if (t >= n) return 1.0;
  if (t <= 0.5) return 0.0;
  const int k = static_cast<int>(std::ceil(t));
  const double h = k - t;
  const int m = 2 * k - 1;

  std::vector<double> H(m * m, 0.0);
  auto at = [&](std::vector<double>& mat, int i, int j) -> double& { return mat[i * m + j]; };
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (i - j + 1 >= 0) at(H, i, j) = 1.0;
  for (int i = 0; i < m; ++i) {
    at(H, i, 0) -= std::pow(h, i + 1);
    at(H, m - 1, i) -= std::pow(h, m - i);
  }
  at(H, m - 1, 0) += 2.0 * h - 1.0 > 0.0 ? std::pow(2.0 * h - 1.0, m) : 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (i - j + 1 > 0)
        for (int g = 1; g <= i - j + 1; ++g) at(H, i, j) /= g;

  // H^n with overflow scaling
  std::vector<double> tmp(m * m, 0.0);
  auto mat_mul = [&](const std::vector<double>& a, const std::vector<double>& b) {
    std::fill(tmp.begin(), tmp.end(), 0.0);
    for (int i = 0; i < m; ++i)
      for (int g = 0; g < m; ++g) {
        const double av = a[i * m + g];
        if (av == 0.0) continue;
        for (int j = 0; j < m; ++j) tmp[i * m + j] += av * b[g * m + j];
      }
  };
  std::vector<double> base(H);
  int base_exp = 0;
  // simple repeated squaring on (base, base_exp)
  std::vector<double> result;
  int result_exp = 0;
  bool has_result = false;
  int remaining = n;
  while (remaining > 0) {
    if (remaining & 1) {
      if (!has_result) {
        result = base;
        result_exp = base_exp;
        has_result = true;
      } else {
        mat_mul(result, base);
        result.swap(tmp);
        result_exp += base_exp;
        if (result[(k - 1) * m + (k - 1)] > 1e140) {
          for (double& v : result) v *= 1e-140;
          result_exp += 140;
        }
      }
    }
    remaining >>= 1;
    if (remaining == 0) break;
    mat_mul(base, base);
    base.swap(tmp);
    base_exp *= 2;
    if (base[(k - 1) * m + (k - 1)] > 1e140) {
      for (double& v : base) v *= 1e-140;
      base_exp += 140;
    }
  }
  double s = result[(k - 1) * m + (k - 1)];
  int s_exp = result_exp;
  for (int i = 1; i <= n; ++i) {
    s *= static_cast<double>(i) / n;
    if (s < 1e-140) {
      s *= 1e140;
      s_exp -= 140;
    }
  }
  return s * std::pow(10.0, s_exp);
}

// Kolmogorov asymptotic survival function with the Stephens small-sample
// adjustment of the argument.
double ks_p_asymptotic(int n, double d) {
  const double lambda = (std::sqrt(static_cast<double>(n)) + 0.12 + 0.11 / std::sqrt(n)) * d;
  double sum = 0.0;
  for (int j = 1; j <= 101; ++j) {
    const double term = 2.0 * ((j % 2 == 1) ? 1.0 : -1.0) * std::exp(-2.0 * j * j * lambda * lambda);
    sum += term;
    if (std::fabs(term) < 1e-12) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

double pearson(std::span<const double> x, std::span<const double> y, bool& defined) {
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) {
    defined = false;
    return 0.0;
  }
  defined = true;
  return sxy / std::sqrt(sxx * syy);
}

double round5(double x) { return std::round(x * 1e5) / 1e5; }

}  // namespace

KsResult ks_test(std::span<const double> data, const UgTwoParam& params) {
  validate(params);
  if (data.empty()) throw InsufficientDataError("ks_test: empty sample");
  for (double x : data)
    if (!(x > 0.0) || !(x < 1.0)) throw DomainError("ks_test: data must lie strictly in (0,1)");

  std::vector<double> sorted(data.begin(), data.end());
  std::sort(sorted.begin(), sorted.end());
  const int n = static_cast<int>(sorted.size());
  double d = 0.0;
  for (int i = 0; i < n; ++i) {
    const double f = cdf(sorted[i], params);
    d = std::max(d, (i + 1.0) / n - f);
    d = std::max(d, f - static_cast<double>(i) / n);
  }
  KsResult result;
  result.statistic = d;
  result.p_value = n <= 100 ? 1.0 - ks_cdf_exact(n, d) : ks_p_asymptotic(n, d);
  return result;
}

std::vector<ThetaCorrelation> theta_diagnostic(const RecordSeries& records,
                                               std::span<const double> theta_grid) {
  validate(records);
  if (records.size() < 3)
    throw InsufficientDataError("theta_diagnostic: at least 3 records required");
  std::vector<ThetaCorrelation> out;
  out.reserve(theta_grid.size());
  const int n = static_cast<int>(records.size());
  for (double theta : theta_grid) {
    std::vector<double> means(n);
    for (int i = 0; i < n; ++i) means[i] = single_moment(1.0, i + 1, records.k, theta);
    ThetaCorrelation tc;
    tc.theta = theta;
    tc.correlation = pearson(records.values, means, tc.defined);
    out.push_back(tc);
  }
  return out;
}

AnalysisReport analyze(std::span<const double> data, int k, double theta,
                       const AnalyzeOptions& options) {
  if (!(theta > 0.0)) throw DomainError("analyze: theta must be positive");
  if (!(options.level > 0.0 && options.level < 1.0))
    throw DomainError("analyze: level must lie in (0,1)");

  AnalysisReport report;
  report.k = k;
  report.theta = theta;
  report.level = options.level;
  report.seed = options.seed;
  report.fidelity = options.fidelity;

  report.records = extract_lower_k_records(data, k);
  const int n = options.use_first_n ? *options.use_first_n
                                    : static_cast<int>(report.records.size());
  if (n < 2 || static_cast<int>(report.records.size()) < n)
    throw InsufficientDataError("analyze: need at least 2 extracted records");
  report.n_used = n;

  RecordSeries used;
  used.k = k;
  used.values.assign(report.records.values.begin(), report.records.values.begin() + n);

  // goodness of fit on the raw data (soft stage: recorded, never fatal)
  try {
    report.fit = fit_mle(data);
    report.ks = ks_test(data, report.fit->params);
  } catch (const Error& e) {
    report.stage_errors.emplace_back("fit", e.what());
  }

  // theta diagnostic; fidelity mode correlates against the rounded means
  try {
    report.theta_diag = theta_diagnostic(report.records, options.theta_grid);
    if (options.fidelity) {
      const int nr = static_cast<int>(report.records.size());
      for (auto& tc : report.theta_diag) {
        std::vector<double> means(nr);
        for (int i = 0; i < nr; ++i)
          means[i] = round5(single_moment(1.0, i + 1, k, tc.theta));
        tc.correlation = pearson(report.records.values, means, tc.defined);
      }
    }
    const auto best = std::max_element(
        report.theta_diag.begin(), report.theta_diag.end(),
        [](const ThetaCorrelation& a, const ThetaCorrelation& b) {
          return a.correlation < b.correlation;
        });
    report.chosen_theta = best != report.theta_diag.end() ? best->theta : theta;
  } catch (const Error& e) {
    report.stage_errors.emplace_back("theta_diagnostic", e.what());
    report.chosen_theta = theta;
  }

  // estimation and prediction inputs
  PredictionSetup setup = make_prediction_setup(n, k, theta);
  BlueCoefficients coeffs = blue_coefficients(setup.table);
  double v4_used = v4(setup, coeffs);

  if (options.fidelity) {
    v4_used = round5(v4_used);
    for (auto& w : coeffs.a) w = round5(w);
    for (auto& w : coeffs.b) w = round5(w);
    coeffs.v1 = round5(coeffs.v1);
    coeffs.v2 = round5(coeffs.v2);
    coeffs.v3 = round5(coeffs.v3);
    for (auto& a : setup.table.alpha) a = round5(a);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) setup.table.B(i, j) = round5(setup.table.B(i, j));
    for (auto& w : setup.omega) w = round5(w);
    setup.alpha_next = round5(setup.alpha_next);
    // the published worked example reads Var(Z_{n+1}) from the k=1 column;
    // fidelity mode reproduces that lookup
    setup.var_next = round5(covariance(n + 1, n + 1, 1, theta));
  }
  report.coefficients = coeffs;

  const auto [mu_star, sigma_star] = blue_estimate(used, coeffs);
  report.estimates = blie_from_blue(mu_star, sigma_star, coeffs);

  report.prediction.blup = blup(used, setup, coeffs);
  report.prediction.v4 = v4_used;
  report.prediction.mspe_blup = mspe_blup(setup, coeffs);
  if (options.fidelity) {
    report.prediction.blip =
        report.prediction.blup - v4_used / (1.0 + coeffs.v2) * sigma_star;
    report.prediction.mspe_blip = blip_and_mspe(report.prediction.blup, sigma_star, setup,
                                                coeffs).mspe;
  } else {
    const BlipResult blip = blip_and_mspe(report.prediction.blup, sigma_star, setup, coeffs);
    report.prediction.blip = blip.blip;
    report.prediction.mspe_blip = blip.mspe;
  }
  report.prediction.rec = report.prediction.mspe_blup / report.prediction.mspe_blip;

  // quantile tables: external when provided, otherwise simulated here
  std::vector<QuantileTable> tables;
  if (options.quantile_tables) {
    tables = *options.quantile_tables;
  } else {
    const double gamma = 1.0 - options.level;
    const std::array<double, 4> probs = {gamma / 2.0, 0.05, 0.95, 1.0 - gamma / 2.0};
    const PivotSimulation sim = simulate_pivots(theta, k, n, options.pivot_reps, probs,
                                                Rng::substream(options.seed, 7));
    tables.assign(sim.tables.begin(), sim.tables.end());
  }
  auto find_table = [&](PivotId id) -> const QuantileTable* {
    for (const auto& t : tables)
      if (t.pivot == id) return &t;
    return nullptr;
  };
  auto push_interval = [&](PivotId id, auto&& make) {
    const QuantileTable* t = find_table(id);
    if (!t) return;
    try {
      report.intervals.push_back({id, make(*t)});
    } catch (const Error& e) {
      report.stage_errors.emplace_back("interval " + pivot_name(id), e.what());
    }
  };
  push_interval(PivotId::t1, [&](const QuantileTable& t) {
    return ci_location(report.estimates, coeffs, t, options.level);
  });
  push_interval(PivotId::t3, [&](const QuantileTable& t) {
    return ci_location(report.estimates, coeffs, t, options.level);
  });
  push_interval(PivotId::t2, [&](const QuantileTable& t) {
    return ci_scale(report.estimates, coeffs, t, options.level);
  });
  push_interval(PivotId::t4, [&](const QuantileTable& t) {
    return ci_scale(report.estimates, coeffs, t, options.level);
  });
  push_interval(PivotId::t1_star, [&](const QuantileTable& t) {
    return pi_next_record(used, report.estimates.sigma_blue, t, options.level);
  });
  push_interval(PivotId::t2_star, [&](const QuantileTable& t) {
    return pi_next_record(used, report.estimates.sigma_blie, t, options.level);
  });
  return report;
}

namespace {

nlohmann::json interval_to_json(const LabeledInterval& li) {
  const char* target = li.interval.target == IntervalTarget::mu       ? "mu"
                       : li.interval.target == IntervalTarget::sigma ? "sigma"
                                                                     : "next_record";
  return {{"pivot", pivot_name(li.pivot)},
          {"target", target},
          {"level", li.interval.level},
          {"lower", li.interval.lower},
          {"upper", li.interval.upper},
          {"raw_lower", li.interval.raw_lower},
          {"raw_upper", li.interval.raw_upper}};
}

}  // namespace

std::string report_to_json(const AnalysisReport& report) {
  nlohmann::json j;
  j["k"] = report.k;
  j["theta"] = report.theta;
  j["level"] = report.level;
  j["seed"] = report.seed;
  j["fidelity"] = report.fidelity;
  j["records"] = {{"k", report.records.k},
                  {"values", report.records.values},
                  {"source_index", report.records.source_index}};
  j["n_used"] = report.n_used;
  if (report.fit) {
    j["fit"] = {{"alpha", report.fit->params.alpha},
                {"theta", report.fit->params.theta},
                {"log_likelihood", report.fit->log_likelihood},
                {"gradient_norm", report.fit->gradient_norm},
                {"iterations", report.fit->iterations}};
  }
  if (report.ks) j["ks"] = {{"statistic", report.ks->statistic}, {"p_value", report.ks->p_value}};
  j["theta_diagnostic"] = nlohmann::json::array();
  for (const auto& tc : report.theta_diag)
    j["theta_diagnostic"].push_back(
        {{"theta", tc.theta}, {"correlation", tc.correlation}, {"defined", tc.defined}});
  j["chosen_theta"] = report.chosen_theta;
  j["coefficients"] = {{"a", report.coefficients.a},
                       {"b", report.coefficients.b},
                       {"V1", report.coefficients.v1},
                       {"V2", report.coefficients.v2},
                       {"V3", report.coefficients.v3}};
  j["estimates"] = {{"mu_blue", report.estimates.mu_blue},
                    {"sigma_blue", report.estimates.sigma_blue},
                    {"mu_blie", report.estimates.mu_blie},
                    {"sigma_blie", report.estimates.sigma_blie},
                    {"var_mu_blue", report.estimates.var_mu_blue},
                    {"var_sigma_blue", report.estimates.var_sigma_blue},
                    {"cov_blue", report.estimates.cov_blue},
                    {"var_mu_blie", report.estimates.var_mu_blie},
                    {"var_sigma_blie", report.estimates.var_sigma_blie},
                    {"cov_blie", report.estimates.cov_blie}};
  j["prediction"] = {{"blup", report.prediction.blup},
                     {"blip", report.prediction.blip},
                     {"V4", report.prediction.v4},
                     {"mspe_blup", report.prediction.mspe_blup},
                     {"mspe_blip", report.prediction.mspe_blip},
                     {"rec", report.prediction.rec}};
  j["intervals"] = nlohmann::json::array();
  for (const auto& li : report.intervals) j["intervals"].push_back(interval_to_json(li));
  if (!report.stage_errors.empty()) {
    j["stage_errors"] = nlohmann::json::array();
    for (const auto& [stage, message] : report.stage_errors)
      j["stage_errors"].push_back({{"stage", stage}, {"message", message}});
  }
  return j.dump(2);
}

std::string report_to_text(const AnalysisReport& report) {
  std::ostringstream out;
  out.precision(7);
  out << "lower " << report.k << "-records (" << report.records.size() << "): ";
  for (std::size_t i = 0; i < report.records.size(); ++i)
    out << (i ? ", " : "") << report.records.values[i];
  out << "\n";
  if (report.fit)
    out << "fit: alpha = " << report.fit->params.alpha << ", theta = " << report.fit->params.theta
        << "\n";
  if (report.ks)
    out << "K-S: D = " << report.ks->statistic << ", p = " << report.ks->p_value << "\n";
  out << "theta diagnostic (theta: correlation):";
  for (const auto& tc : report.theta_diag) out << " " << tc.theta << ": " << tc.correlation;
  out << "\nchosen theta = " << report.chosen_theta << " (pipeline ran at " << report.theta
      << ")\n";
  out << "BLUE:  mu* = " << report.estimates.mu_blue << ", sigma* = " << report.estimates.sigma_blue
      << "\n";
  out << "BLIE:  mu~ = " << report.estimates.mu_blie << ", sigma~ = " << report.estimates.sigma_blie
      << "\n";
  out << "BLUP = " << report.prediction.blup << " (MSPE " << report.prediction.mspe_blup
      << " sigma^2), BLIP = " << report.prediction.blip << " (MSPE " << report.prediction.mspe_blip
      << " sigma^2)\n";
  for (const auto& li : report.intervals) {
    out << pivot_name(li.pivot) << " " << 100 * li.interval.level << "% interval: ["
        << li.interval.lower << ", " << li.interval.upper << "]\n";
  }
  for (const auto& [stage, message] : report.stage_errors)
    out << "stage error (" << stage << "): " << message << "\n";
  return out.str();
}

std::vector<double> read_observations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::user, "cannot open input: " + path);
  std::vector<double> out;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    // strip comments and whitespace
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
      line.pop_back();
    std::size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos) continue;
    const std::string body = line.substr(start);
    try {
      std::size_t used = 0;
      const double v = std::stod(body, &used);
      if (used != body.size()) throw std::invalid_argument("trailing characters");
      out.push_back(v);
    } catch (...) {
      if (first) {
        first = false;  // tolerate one header line
        continue;
      }
      throw DomainError("cannot parse observation: '" + body + "'");
    }
    first = false;
  }
  return out;
}

}  // namespace ugr
