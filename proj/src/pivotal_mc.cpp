#include "ugr/pivotal_mc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ugr/errors.hpp"
#include "ugr/rng.hpp"

namespace ugr {

std::string pivot_name(PivotId id) {
  switch (id) {
    case PivotId::t1: return "T1";
    case PivotId::t2: return "T2";
    case PivotId::t3: return "T3";
    case PivotId::t4: return "T4";
    case PivotId::t1_star: return "T1star";
    case PivotId::t2_star: return "T2star";
  }
  throw DomainError("pivot_name: unknown pivot");
}

PivotId pivot_from_name(const std::string& name) {
  std::string s;
  for (char c : name) {
    if (c == '*') { s += "star"; continue; }
    s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  if (s == "t1") return PivotId::t1;
  if (s == "t2") return PivotId::t2;
  if (s == "t3") return PivotId::t3;
  if (s == "t4") return PivotId::t4;
  if (s == "t1star") return PivotId::t1_star;
  if (s == "t2star") return PivotId::t2_star;
  throw DomainError("unknown pivot name: " + name);
}

double QuantileTable::quantile_at(double p) const {
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (std::fabs(probs[i] - p) <= 1e-9) return quantiles[i];
  }
  std::ostringstream msg;
  msg << "quantile table for " << pivot_name(pivot) << " does not contain p = " << p;
  throw MissingQuantileError(msg.str());
}

double quantile_type7(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw DomainError("quantile_type7: empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("quantile_type7: p outside [0,1]");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - lo) * (sorted[lo + 1] - sorted[lo]);
}

PivotSimulation simulate_pivots(double theta, int k, int n, std::size_t reps,
                                std::span<const double> probs, std::uint64_t seed) {
  if (n < 2) throw DomainError("simulate_pivots: n must be >= 2");
  if (reps < 1000) throw DomainError("simulate_pivots: at least 1000 replications required");
  for (double p : probs) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("simulate_pivots: probs must lie in (0,1)");
  }

  const MomentTable table = build_moment_table(n, k, theta);
  const BlueCoefficients coeffs = blue_coefficients(table);
  const double sqrt_v1 = std::sqrt(coeffs.v1);
  const double sqrt_v2 = std::sqrt(coeffs.v2);
  const double blie_mu_factor = blie_location_pivot_factor(coeffs);
  const double blie_sigma_factor = sqrt_v2 / (1.0 + coeffs.v2);

  PivotSimulation sim;
  for (auto& s : sim.samples) s.resize(reps);

  const UgParams standardized{0.0, 1.0, theta};
  for (std::size_t rep = 0; rep < reps; ++rep) {
    const RecordSeries full =
        simulate_k_records(standardized, k, n + 1, Rng::substream(seed, rep));
    RecordSeries head;
    head.k = k;
    head.values.assign(full.values.begin(), full.values.end() - 1);

    const auto [mu_star, sigma_star] = blue_estimate(head, coeffs);
    if (sigma_star <= 0.0) ++sim.nonpositive_sigma_count;
    const double sigma_tilde = sigma_star / (1.0 + coeffs.v2);
    const double mu_tilde = mu_star - coeffs.v3 / (1.0 + coeffs.v2) * sigma_star;
    const double jump = full.values[n] - full.values[n - 1];  // R_{n+1} - R_n < 0

    sim.samples[0][rep] = mu_star / (sigma_star * sqrt_v1);
    sim.samples[1][rep] = (sigma_star - 1.0) / sqrt_v2;
    sim.samples[2][rep] = mu_tilde / (sigma_tilde * blie_mu_factor);
    sim.samples[3][rep] = (sigma_tilde - 1.0) / blie_sigma_factor;
    sim.samples[4][rep] = jump / sigma_star;
    sim.samples[5][rep] = jump / sigma_tilde;
  }

  for (std::size_t i = 0; i < 6; ++i) {
    QuantileTable& qt = sim.tables[i];
    qt.pivot = kAllPivots[i];
    qt.theta = theta;
    qt.k = k;
    qt.n = n;
    qt.reps = reps;
    qt.seed = seed;
    qt.nonpositive_sigma_count = sim.nonpositive_sigma_count;
    qt.probs.assign(probs.begin(), probs.end());
    std::vector<double> sorted = sim.samples[i];
    std::sort(sorted.begin(), sorted.end());
    qt.quantiles.reserve(probs.size());
    for (double p : probs) qt.quantiles.push_back(quantile_type7(sorted, p));
  }
  return sim;
}

QuantileTable simulate_pivot_quantiles(PivotId id, double theta, int k, int n, std::size_t reps,
                                       std::span<const double> probs, std::uint64_t seed) {
  return simulate_pivots(theta, k, n, reps, probs, seed).table(id);
}

namespace {

std::pair<double, double> tail_probs(const QuantileTable& table, double level) {
  if (!(level > 0.0 && level < 1.0)) throw DomainError("interval level must lie in (0,1)");
  const double gamma = 1.0 - level;
  return {table.quantile_at(gamma / 2.0), table.quantile_at(1.0 - gamma / 2.0)};
}

}  // namespace

Interval ci_location(const LinearEstimates& estimates, const BlueCoefficients& coeffs,
                     const QuantileTable& table, double level) {
  double center, scale;
  if (table.pivot == PivotId::t1) {
    center = estimates.mu_blue;
    scale = estimates.sigma_blue * std::sqrt(coeffs.v1);
  } else if (table.pivot == PivotId::t3) {
    center = estimates.mu_blie;
    scale = estimates.sigma_blie * blie_location_pivot_factor(coeffs);
  } else {
    throw DomainError("ci_location: table must hold T1 or T3 quantiles");
  }
  const auto [q_lo, q_hi] = tail_probs(table, level);
  Interval ci;
  ci.target = IntervalTarget::mu;
  ci.level = level;
  ci.raw_lower = ci.lower = center - scale * q_hi;
  ci.raw_upper = ci.upper = center - scale * q_lo;
  return ci;
}

Interval ci_scale(const LinearEstimates& estimates, const BlueCoefficients& coeffs,
                  const QuantileTable& table, double level) {
  double center, factor;
  if (table.pivot == PivotId::t2) {
    center = estimates.sigma_blue;
    factor = std::sqrt(coeffs.v2);
  } else if (table.pivot == PivotId::t4) {
    center = estimates.sigma_blie;
    factor = std::sqrt(coeffs.v2) / (1.0 + coeffs.v2);
  } else {
    throw DomainError("ci_scale: table must hold T2 or T4 quantiles");
  }
  const auto [q_lo, q_hi] = tail_probs(table, level);
  auto bound = [&](double q) {
    const double denom = 1.0 + factor * q;
    if (!(denom > 0.0)) {
      std::ostringstream msg;
      msg << "ci_scale: nonpositive denominator 1 + sqrt(V)*T at quantile " << q;
      throw UndefinedBoundError(msg.str(), q);
    }
    return center / denom;
  };
  Interval ci;
  ci.target = IntervalTarget::sigma;
  ci.level = level;
  ci.raw_lower = bound(q_hi);
  ci.raw_upper = bound(q_lo);
  ci.lower = std::min(ci.raw_lower, ci.raw_upper);
  ci.upper = std::max(ci.raw_lower, ci.raw_upper);
  return ci;
}

Interval pi_next_record(const RecordSeries& records, double sigma_estimate,
                        const QuantileTable& table, double level) {
  if (table.pivot != PivotId::t1_star && table.pivot != PivotId::t2_star)
    throw DomainError("pi_next_record: table must hold T1* or T2* quantiles");
  if (records.values.empty()) throw InsufficientDataError("pi_next_record: no records");
  const double last = records.values.back();
  const auto [q_lo, q_hi] = tail_probs(table, level);
  Interval pi;
  pi.target = IntervalTarget::next_record;
  pi.level = level;
  pi.raw_lower = pi.lower = last + sigma_estimate * q_lo;
  pi.raw_upper = pi.upper = last + sigma_estimate * q_hi;
  return pi;
}

std::filesystem::path quantile_table_path(const std::filesystem::path& dir, PivotId id, int k,
                                          double theta, int n) {
  char theta_str[32];
  std::snprintf(theta_str, sizeof(theta_str), "%g", theta);
  std::ostringstream name;
  name << pivot_name(id) << "_" << k << "_" << theta_str << "_" << n << ".csv";
  return dir / name.str();
}

void write_quantile_table_csv(const QuantileTable& table, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::user, "cannot open for writing: " + path.string());
  out << "pivot,k,theta,n,reps,seed,nonpositive_sigma,prob,quantile\n";
  char buf[128];
  for (std::size_t i = 0; i < table.probs.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%s,%d,%.17g,%d,%zu,%llu,%zu,%.17g,%.17g\n",
                  pivot_name(table.pivot).c_str(), table.k, table.theta, table.n, table.reps,
                  static_cast<unsigned long long>(table.seed), table.nonpositive_sigma_count,
                  table.probs[i], table.quantiles[i]);
    out << buf;
  }
}

QuantileTable read_quantile_table_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::user, "cannot open quantile table: " + path.string());
  std::string line;
  std::getline(in, line);  // header
  QuantileTable table;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    if (cells.size() != 9) throw Error(ErrorKind::user, "malformed quantile table row: " + line);
    if (first) {
      table.pivot = pivot_from_name(cells[0]);
      table.k = std::stoi(cells[1]);
      table.theta = std::stod(cells[2]);
      table.n = std::stoi(cells[3]);
      table.reps = static_cast<std::size_t>(std::stoull(cells[4]));
      table.seed = std::stoull(cells[5]);
      table.nonpositive_sigma_count = static_cast<std::size_t>(std::stoull(cells[6]));
      first = false;
    }
    table.probs.push_back(std::stod(cells[7]));
    table.quantiles.push_back(std::stod(cells[8]));
  }
  if (first) throw Error(ErrorKind::user, "empty quantile table: " + path.string());
  return table;
}

}  // namespace ugr
