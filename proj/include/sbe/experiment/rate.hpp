#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "sbe/error.hpp"
#include "sbe/experiment/diagnostics.hpp"
#include "sbe/experiment/records.hpp"

namespace sbe {

/// Named empirical constants from the lemma and proof-step audit.
using LemmaConstants = std::map<std::string, double>;

struct RateReport {
  double lambda_obs = 0.0;
  double c_obs = 0.0;
  double t_start = 0.0;
  double t_end = 0.0;
  double r_squared = 0.0;
  std::size_t fit_points = 0;
  double delta = std::numeric_limits<double>::quiet_NaN();
  LemmaConstants lemma_constants;
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares y = intercept + slope x, centred for stability.
inline LineFit least_squares(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("least_squares: need >= 2 matching points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw InvalidArgument("least_squares: abscissae are all equal");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (fit.intercept + fit.slope * x[i]);
    ss_res += e * e;
  }
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  return fit;
}

inline constexpr double kDistanceFloor = 10.0 * std::numeric_limits<double>::epsilon();
/// Samples with dist_local below this fraction of dist_total count as f = Pi f.
inline constexpr double kDegenerateFraction = 1e-6;

/// Fits ln(dist_total) against t over the window that starts when E first
/// falls to half its initial value.
inline RateReport estimate_decay_rate(std::span<const DiagnosticsRecord> records) {
  std::size_t usable = 0;
  for (const auto& r : records) usable += r.dist_total > kDistanceFloor ? 1 : 0;
  if (usable < 20)
    throw InvalidArgument("estimate_decay_rate: need >= 20 records above the distance floor, have " +
                          std::to_string(usable));
  if (!(records.front().dist_total > kDistanceFloor)) throw InvalidArgument("estimate_decay_rate: dist_total(0) underflow");

  const double half_e = 0.5 * records.front().E;
  std::size_t first = records.size();
  for (std::size_t i = 0; i < records.size(); ++i)
    if (records[i].E <= half_e) {
      first = i;
      break;
    }

  std::vector<double> t, y;
  for (std::size_t i = first; i < records.size(); ++i) {
    if (!(records[i].dist_total > kDistanceFloor)) continue;
    t.push_back(records[i].time);
    y.push_back(std::log(records[i].dist_total));
  }
  if (t.size() < 10)
    throw InvalidArgument("estimate_decay_rate: fit window too short (" + std::to_string(t.size()) + " points)");

  const LineFit fit = least_squares(t, y);
  RateReport rep;
  rep.lambda_obs = -fit.slope;
  rep.c_obs = std::exp(fit.intercept) / records.front().dist_total;
  rep.t_start = t.front();
  rep.t_end = t.back();
  rep.r_squared = fit.r_squared;
  rep.fit_points = t.size();
  return rep;
}

/// Smallest logarithmic decay rate -d ln E / dt between consecutive records.
/// Returns -inf if E is nonpositive anywhere.
inline double gronwall_ratio_min(std::span<const DiagnosticsRecord> records) {
  double g = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < records.size(); ++i) {
    const auto& a = records[i];
    const auto& b = records[i + 1];
    if (!(a.dist_total > kDistanceFloor && b.dist_total > kDistanceFloor)) continue;
    if (!(a.E > 0.0 && b.E > 0.0)) return -std::numeric_limits<double>::infinity();
    g = std::min(g, -std::log(b.E / a.E) / (b.time - a.time));
  }
  return g;
}

/// Constants that only need the recorded columns: c1 (dissipation vs
/// ||f - Pi f||^2), c6/c7 (E vs ||f - f_inf||^2), c8 (pairing bound) and the
/// Gronwall ratio.
inline LemmaConstants record_constants(std::span<const DiagnosticsRecord> records) {
  const double inf = std::numeric_limits<double>::infinity();
  double c1 = inf, c6 = inf, c7 = -inf, c8 = 0.0;
  double skipped = 0.0;
  for (const auto& r : records) {
    if (!(r.dist_total > kDistanceFloor)) {
      skipped += 1.0;
      continue;
    }
    const double d2 = r.dist_total * r.dist_total;
    c6 = std::min(c6, r.E / d2);
    c7 = std::max(c7, r.E / d2);
    c8 = std::max(c8, std::abs(r.pairing) / d2);
    if (r.dist_local <= kDegenerateFraction * r.dist_total) {
      skipped += 1.0;
      continue;
    }
    c1 = std::min(c1, r.D / (r.dist_local * r.dist_local));
  }
  return {{"c1_min", c1},
          {"c6_min", c6},
          {"c7_max", c7},
          {"c8_max", c8},
          {"gronwall_ratio_min", gronwall_ratio_min(records)},
          {"record_samples_skipped", skipped}};
}

struct DeltaCandidate {
  double delta = 0.0;
  double c6_min = 0.0;
  double gronwall_min = 0.0;
  bool admissible = false;
};

struct DeltaScan {
  double chosen = 0.0;
  std::vector<DeltaCandidate> candidates;
};

inline const std::vector<double>& default_delta_candidates() {
  static const std::vector<double> d{0.2, 0.1, 0.05, 0.02, 0.01, 0.005};
  return d;
}

/// Re-evaluates E for each candidate delta from the H and pairing columns and
/// picks the admissible one (E/||f - f_inf||^2 and the Gronwall ratio both
/// positive) with the largest Gronwall ratio; ties go to the larger delta.
/// Falls back to the smallest candidate if none is admissible.
inline DeltaScan scan_delta(std::vector<DiagnosticsRecord> records,
                            const std::vector<double>& candidates = default_delta_candidates()) {
  DeltaScan scan;
  scan.chosen = *std::min_element(candidates.begin(), candidates.end());
  double best = -std::numeric_limits<double>::infinity();
  double best_delta = -1.0;
  for (double d : candidates) {
    apply_delta(records, d);
    const LemmaConstants k = record_constants(records);
    DeltaCandidate c{d, k.at("c6_min"), k.at("gronwall_ratio_min"), false};
    c.admissible = c.c6_min > 0.0 && c.gronwall_min > 0.0 && std::isfinite(c.gronwall_min);
    if (c.admissible && (c.gronwall_min > best || (c.gronwall_min == best && d > best_delta))) {
      best = c.gronwall_min;
      best_delta = d;
    }
    scan.candidates.push_back(c);
  }
  if (best_delta > 0.0) scan.chosen = best_delta;
  return scan;
}

inline void write_rate_report_text(std::ostream& o, const RateReport& r) {
  o.precision(10);
  o << "Exponential decay fit of ||f(t) - f_inf||\n"
    << "  lambda_obs   " << r.lambda_obs << '\n'
    << "  c_obs        " << r.c_obs << '\n'
    << "  fit window   [" << r.t_start << ", " << r.t_end << "] (" << r.fit_points << " points)\n"
    << "  r^2          " << r.r_squared << '\n';
  if (!std::isnan(r.delta)) o << "  delta        " << r.delta << '\n';
  if (!r.lemma_constants.empty()) {
    o << "Empirical constants\n";
    for (const auto& [k, v] : r.lemma_constants) o << "  " << k << std::string(k.size() < 24 ? 24 - k.size() : 1, ' ') << v << '\n';
  }
}

inline void write_rate_report_kv(std::ostream& o, const RateReport& r) {
  o.precision(17);
  o << "lambda_obs = " << r.lambda_obs << '\n'
    << "c_obs = " << r.c_obs << '\n'
    << "fit_t_start = " << r.t_start << '\n'
    << "fit_t_end = " << r.t_end << '\n'
    << "fit_points = " << r.fit_points << '\n'
    << "r_squared = " << r.r_squared << '\n';
  if (!std::isnan(r.delta)) o << "delta = " << r.delta << '\n';
  for (const auto& [k, v] : r.lemma_constants) o << k << " = " << v << '\n';
}

}  // namespace sbe
