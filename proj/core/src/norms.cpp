#include "mhl/norms.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "mhl/parallel.hpp"

namespace mhl {

namespace {

/// Piecewise-linear profile of t -> int_{B(0, t^{1/d})} |f|^p in the volume
/// variable t = r^d: breakpoints at every shell edge, prefix integrals, and
/// the slope value^p * v_d on each segment (0 across gaps and past the
/// support).
struct IntegralProfile {
  std::vector<double> t;  // breakpoints, t[0] = 0
  std::vector<double> I;  // integral at each breakpoint
  std::vector<double> B;  // slope on [t[k], t[k+1]); size t.size() - 1
};

IntegralProfile build_profile(const RadialStepFunction& f, double p) {
  const int d = f.dimension();
  const double vd = unit_ball_volume(d);
  IntegralProfile prof;
  prof.t.push_back(0.0);
  prof.I.push_back(0.0);
  for (const Shell& s : f.shells()) {
    const double t_in = std::pow(s.inner, d);
    // Shells touching within the merge tolerance can land a hair below the
    // previous edge; clamp so segment widths stay nonnegative.
    const double t_out = std::max(std::pow(s.outer, d), prof.t.back());
    const double w = std::pow(s.value, p) * vd;
    if (t_in > prof.t.back()) {  // gap
      prof.B.push_back(0.0);
      prof.t.push_back(t_in);
      prof.I.push_back(prof.I.back());
    }
    prof.B.push_back(w);
    prof.t.push_back(t_out);
    prof.I.push_back(prof.I.back() + w * (t_out - prof.t[prof.t.size() - 2]));
  }
  return prof;
}

struct SupOutcome {
  double value = 0.0;
  double t = 1.0;
};

/// Exact supremum of  exp(scale_log / p) * ((v_d t)^g * I(t))^{1/p}  over
/// t > 0 for g in [-1, 0]. On each segment the inner expression is
/// (v_d t)^g (A + B t); its only interior critical point is
/// t* = -g A / ((g+1) B), so shell edges plus those points exhaust the
/// candidates. Ties keep the smallest t.
SupOutcome maximize_power_objective(const IntegralProfile& prof, double vd, double g,
                                    double inv_p, double scale_log) {
  SupOutcome best;
  best.value = 0.0;
  best.t = 0.0;
  auto consider = [&](double t, double I) {
    if (!(t > 0.0) || !(I > 0.0)) return;
    const double value = std::exp(inv_p * (g * std::log(vd * t) + std::log(I) + scale_log));
    if (value > best.value) {
      best.value = value;
      best.t = t;
    }
  };
  for (std::size_t k = 1; k < prof.t.size(); ++k) consider(prof.t[k], prof.I[k]);
  if (g < 0.0 && g > -1.0) {
    for (std::size_t k = 0; k + 1 < prof.t.size(); ++k) {
      const double B = prof.B[k];
      if (B <= 0.0) continue;
      const double A = prof.I[k] - B * prof.t[k];
      if (A <= 0.0) continue;  // t* would be <= 0
      const double t_star = -g * A / ((g + 1.0) * B);
      if (t_star > prof.t[k] && t_star < prof.t[k + 1]) {
        consider(t_star, prof.I[k] + B * (t_star - prof.t[k]));
      }
    }
  }
  if (best.t == 0.0) best.t = 1.0;  // zero function: conventional argmax
  return best;
}

void validate_classical(const Rational& p, const Rational& q) {
  if (p < Rational(1)) throw std::invalid_argument("norm: p must be >= 1");
  if (q < p) throw std::invalid_argument("norm: requires p <= q");
}

NormResult classical_sup(const RadialStepFunction& f, const Rational& p, const Rational& q) {
  NormResult result;
  result.method = "exact-candidates";
  result.tolerance = 0.0;
  if (f.is_zero()) return result;
  const double pd = p.to_double();
  const double g = (p / q - Rational(1)).to_double();  // p/q - 1 in (-1, 0]
  const IntegralProfile prof = build_profile(f, pd);
  const SupOutcome sup =
      maximize_power_objective(prof, unit_ball_volume(f.dimension()), g, 1.0 / pd, 0.0);
  result.value = sup.value;
  result.argmax_radius = std::pow(sup.t, 1.0 / f.dimension());
  return result;
}

/// Exact path for phi(r) = r^{-a}: the objective^p is
/// v_d^{-ap/d} (v_d t)^{ap/d - 1} I(t), the same power form with
/// g = ap/d - 1 in [-1, 0] exactly when phi lies in G_p.
NormResult generalized_power_sup(const RadialStepFunction& f, const Rational& p,
                                 const Rational& a) {
  const int d = f.dimension();
  if (a < Rational(0) || a * p > Rational(d)) {
    throw std::invalid_argument("generalized norm: power phi with a = " + a.str() +
                                " is not in G_p for p = " + p.str() + ", d = " +
                                std::to_string(d) + " (norm infinite on this class)");
  }
  NormResult result;
  result.method = "exact-candidates";
  result.tolerance = 0.0;
  if (f.is_zero()) return result;
  const double pd = p.to_double();
  const double apd = (a * p / Rational(d)).to_double();
  const double vd = unit_ball_volume(d);
  const IntegralProfile prof = build_profile(f, pd);
  const SupOutcome sup =
      maximize_power_objective(prof, vd, apd - 1.0, 1.0 / pd, -apd * std::log(vd));
  result.value = sup.value;
  result.argmax_radius = std::pow(sup.t, 1.0 / d);
  return result;
}

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> out(n);
  const double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < n; ++i) out[i] = std::exp(llo + (lhi - llo) * i / (n - 1));
  return out;
}

void grid_range(const RadialStepFunction& f, const OracleConfig& cfg, double& lo, double& hi) {
  const double r_min = f.min_positive_breakpoint();
  const double r_max = f.max_radius();
  lo = r_min / cfg.radius_pad;
  hi = r_max * cfg.radius_pad;
}

/// Golden-section ascent of a log-scale unimodal-enough bracket; returns the
/// refined maximizer in log(r).
template <typename F>
double golden_section_max(F&& value_at_logr, double u_lo, double u_hi) {
  constexpr double phi_ratio = 0.6180339887498949;
  double a = u_lo, b = u_hi;
  double x1 = b - phi_ratio * (b - a);
  double x2 = a + phi_ratio * (b - a);
  double f1 = value_at_logr(x1);
  double f2 = value_at_logr(x2);
  for (int it = 0; it < 90 && b - a > 1e-13 * std::max(1.0, std::abs(b)); ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi_ratio * (b - a);
      f2 = value_at_logr(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi_ratio * (b - a);
      f1 = value_at_logr(x1);
    }
  }
  return 0.5 * (a + b);
}

/// Table-phi strong norm: grid scan plus golden-section refinement inside
/// the bracketing interval; deterministic, relative tolerance 1e-10.
NormResult generalized_table_sup(const RadialStepFunction& f, const Rational& p,
                                 const PhiSpec& phi, const OracleConfig& cfg) {
  NormResult result;
  result.method = "grid-refined";
  if (f.is_zero()) return result;
  const int d = f.dimension();
  const double pd = p.to_double();
  const double vd = unit_ball_volume(d);
  auto objective = [&](double r) {
    const double I = ball_integral_power(f, p, r);
    if (I <= 0.0) return 0.0;
    return (1.0 / phi(r)) * std::pow(I / (vd * std::pow(r, d)), 1.0 / pd);
  };
  double lo = 0, hi = 0;
  grid_range(f, cfg, lo, hi);
  const auto grid = log_grid(lo, hi, cfg.radius_grid_size);
  std::size_t best = 0;
  double best_value = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = objective(grid[i]);
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  const double u_lo = std::log(grid[best == 0 ? 0 : best - 1]);
  const double u_hi = std::log(grid[std::min(best + 1, grid.size() - 1)]);
  const double u_star =
      golden_section_max([&](double u) { return objective(std::exp(u)); }, u_lo, u_hi);
  const double refined = objective(std::exp(u_star));
  if (refined > best_value) {
    best_value = refined;
    result.argmax_radius = std::exp(u_star);
  } else {
    result.argmax_radius = grid[best];
  }
  result.value = best_value;
  result.tolerance = 1e-10 * best_value;
  return result;
}

/// The weak supremum over gamma is exact over the distinct value levels
/// approached from below: evaluate each level against {f >= level} and keep
/// the best.
template <typename LevelNorm>
NormResult weak_via_levels(const RadialStepFunction& f, LevelNorm&& level_norm) {
  NormResult best;
  best.argmax_gamma = 0.0;
  for (double level : f.distinct_values_descending()) {
    const RadialStepFunction indicator = f.superlevel_indicator(level);
    NormResult at_level = level_norm(indicator);
    at_level.value *= level;
    at_level.tolerance *= level;
    if (at_level.value > best.value) {
      best = at_level;
      best.argmax_gamma = level;
    }
  }
  if (!best.argmax_gamma.has_value()) best.argmax_gamma = 0.0;
  return best;
}

double splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  z = z ^ (z >> 31);
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

}  // namespace

void OracleConfig::validate() const {
  if (radius_grid_size < 64) throw std::invalid_argument("oracle config: grid size < 64");
  if (!(radius_pad > 1.0)) throw std::invalid_argument("oracle config: pad must be > 1");
  if (samples < 16) throw std::invalid_argument("oracle config: samples < 16");
}

NormResult morrey_norm(const RadialStepFunction& f, const Rational& p, const Rational& q) {
  validate_classical(p, q);
  return classical_sup(f, p, q);
}

NormResult weak_morrey_norm(const RadialStepFunction& f, const Rational& p,
                            const Rational& q) {
  validate_classical(p, q);
  NormResult result = weak_via_levels(
      f, [&](const RadialStepFunction& indicator) { return classical_sup(indicator, p, q); });
  result.method = "exact-candidates";
  result.tolerance = 0.0;
  return result;
}

NormResult generalized_morrey_norm(const RadialStepFunction& f, const Rational& p,
                                   const PhiSpec& phi, const OracleConfig& cfg) {
  if (p < Rational(1)) throw std::invalid_argument("norm: p must be >= 1");
  cfg.validate();
  if (phi.is_power()) return generalized_power_sup(f, p, phi.power_exponent());
  return generalized_table_sup(f, p, phi, cfg);
}

NormResult generalized_weak_morrey_norm(const RadialStepFunction& f, const Rational& p,
                                        const PhiSpec& phi, const OracleConfig& cfg) {
  if (p < Rational(1)) throw std::invalid_argument("norm: p must be >= 1");
  cfg.validate();
  NormResult result = weak_via_levels(f, [&](const RadialStepFunction& indicator) {
    return phi.is_power() ? generalized_power_sup(indicator, p, phi.power_exponent())
                          : generalized_table_sup(indicator, p, phi, cfg);
  });
  result.method = phi.is_power() ? "exact-candidates" : "grid-refined";
  if (phi.is_power()) result.tolerance = 0.0;
  return result;
}

namespace {

/// Shared brute-force grid scan. weight_log(r) is the log of the radius
/// weight in front of the integral/measure term.
struct OracleScan {
  NormResult result;
  double grid_spacing_log = 0.0;
};

template <typename Objective>
OracleScan oracle_scan(const RadialStepFunction& f, const OracleConfig& cfg,
                       Objective&& objective) {
  OracleScan scan;
  scan.result.method = "grid-oracle";
  if (f.is_zero()) return scan;
  double lo = 0, hi = 0;
  grid_range(f, cfg, lo, hi);
  const auto grid = log_grid(lo, hi, cfg.radius_grid_size);
  scan.grid_spacing_log = (std::log(hi) - std::log(lo)) / (cfg.radius_grid_size - 1);
  std::vector<double> values(grid.size());
  std::vector<double> gammas(grid.size(), -1.0);
  parallel_for(grid.size(), [&](std::size_t i) {
    values[i] = objective(grid[i], &gammas[i]);
  });
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (values[i] > scan.result.value) {
      scan.result.value = values[i];
      scan.result.argmax_radius = grid[i];
      if (gammas[i] >= 0.0) scan.result.argmax_gamma = gammas[i];
    }
  }
  return scan;
}

void finish_oracle(OracleScan& scan, double descent_slope_cap) {
  // One-sided resolution bound: some grid point sits within one spacing h
  // above the argmax in log r, where the objective can have fallen by at
  // most e^{s h}; add a small guard for the gamma scaling and rounding.
  const double h = scan.grid_spacing_log;
  scan.result.tolerance =
      scan.result.value * (std::expm1(std::max(0.0, descent_slope_cap) * h) + 2e-9);
}

}  // namespace

NormResult oracle_norm(const RadialStepFunction& f, const Rational& p, const Rational& q,
                       bool weak, const OracleConfig& cfg) {
  validate_classical(p, q);
  cfg.validate();
  const int d = f.dimension();
  const double pd = p.to_double();
  const double vd = unit_ball_volume(d);
  const double exponent = (q.reciprocal() - p.reciprocal()).to_double();  // 1/q - 1/p
  const std::vector<double> levels = f.distinct_values_descending();
  auto objective = [&](double r, double* gamma_out) {
    const double weight = std::pow(vd * std::pow(r, d), exponent);
    if (!weak) {
      const double I = ball_integral_power(f, p, r);
      return I > 0.0 ? weight * std::pow(I, 1.0 / pd) : 0.0;
    }
    double best = 0.0;
    for (double level : levels) {
      const double gamma = level * (1.0 - 1e-9);
      const double meas = superlevel_measure(f, gamma, r);
      if (meas <= 0.0) continue;
      const double v = gamma * weight * std::pow(meas, 1.0 / pd);
      if (v > best) {
        best = v;
        *gamma_out = level;  // report the attaining value level
      }
    }
    return best;
  };
  OracleScan scan = oracle_scan(f, cfg, objective);
  finish_oracle(scan, d * (p.reciprocal() - q.reciprocal()).to_double());
  return scan.result;
}

NormResult oracle_norm(const RadialStepFunction& f, const Rational& p, const PhiSpec& phi,
                       bool weak, const OracleConfig& cfg) {
  if (p < Rational(1)) throw std::invalid_argument("norm: p must be >= 1");
  cfg.validate();
  const int d = f.dimension();
  const double pd = p.to_double();
  const double vd = unit_ball_volume(d);
  const std::vector<double> levels = f.distinct_values_descending();
  auto objective = [&](double r, double* gamma_out) {
    const double ball = vd * std::pow(r, d);
    const double inv_phi = 1.0 / phi(r);
    if (!weak) {
      const double I = ball_integral_power(f, p, r);
      return I > 0.0 ? inv_phi * std::pow(I / ball, 1.0 / pd) : 0.0;
    }
    double best = 0.0;
    for (double level : levels) {
      const double gamma = level * (1.0 - 1e-9);
      const double meas = superlevel_measure(f, gamma, r);
      if (meas <= 0.0) continue;
      const double v = gamma * inv_phi * std::pow(meas / ball, 1.0 / pd);
      if (v > best) {
        best = v;
        *gamma_out = level;  // report the attaining value level
      }
    }
    return best;
  };
  OracleScan scan = oracle_scan(f, cfg, objective);
  const double slope_cap =
      phi.is_power()
          ? static_cast<double>(d) / pd - phi.power_exponent().to_double()
          : static_cast<double>(d) / pd + phi.max_upward_loglog_slope();
  finish_oracle(scan, slope_cap);
  return scan.result;
}

AuditReport audit_centered_supremum(const RadialStepFunction& f, const Rational& p,
                                    const Rational& q, int num_balls,
                                    const OracleConfig& cfg) {
  validate_classical(p, q);
  cfg.validate();
  const int d = f.dimension();
  if (d > 2)
    throw std::invalid_argument("audit_centered_supremum: only d <= 2 is supported");
  if (num_balls < 1) throw std::invalid_argument("audit: need at least one sample");

  AuditReport report;
  report.centered_value = morrey_norm(f, p, q).value;
  if (f.is_zero()) return report;

  const double pd = p.to_double();
  const double vd = unit_ball_volume(d);
  const double exponent = (q.reciprocal() - p.reciprocal()).to_double();
  const double r_max = f.max_radius();
  const double r_min = f.min_positive_breakpoint();

  std::vector<double> values(num_balls), errors(num_balls, 0.0);
  std::vector<double> centers(num_balls), radii(num_balls);
  // Centers log-uniform over [r_max/100, 4 r_max], radii over the oracle
  // grid range [r_min/pad, pad r_max].
  std::uint64_t seed_state = cfg.seed;
  for (int i = 0; i < num_balls; ++i) {
    const double ua = splitmix64(seed_state);
    const double ur = splitmix64(seed_state);
    centers[i] = (r_max / 100.0) * std::exp(ua * std::log(400.0));
    radii[i] = (r_min / cfg.radius_pad) *
               std::exp(ur * std::log(cfg.radius_pad * cfg.radius_pad * r_max / r_min));
  }

  if (d == 1) {
    parallel_for(num_balls, [&](std::size_t i) {
      const double I = offcenter_integral_1d(f, centers[i], radii[i], p);
      values[i] = I > 0.0 ? std::pow(2.0 * radii[i], exponent) * std::pow(I, 1.0 / pd) : 0.0;
    });
    report.samples_used = num_balls;
  } else {
    parallel_for(num_balls, [&](std::size_t i) {
      // Per-ball substream so results are independent of scheduling.
      const std::uint64_t substream = cfg.seed ^ (0x5851f42d4c957f2dull * (i + 1));
      const McIntegral I =
          offcenter_integral_mc_2d(f, centers[i], radii[i], p, cfg.samples, substream);
      if (I.value > 0.0) {
        const double ball = vd * radii[i] * radii[i];
        values[i] = std::pow(ball, exponent) * std::pow(I.value, 1.0 / pd);
        errors[i] = values[i] * I.stderr_ / (pd * I.value);  // delta method
      }
    });
    report.samples_used = static_cast<long>(num_balls) * cfg.samples;
  }

  for (int i = 0; i < num_balls; ++i) {
    if (values[i] > report.max_offcenter_value) {
      report.max_offcenter_value = values[i];
      report.max_offcenter_stderr = errors[i];
      report.worst_center = centers[i];
      report.worst_radius = radii[i];
    }
  }
  report.margin = report.centered_value - report.max_offcenter_value;
  return report;
}

std::string norm_result_to_json(const NormResult& result) {
  nlohmann::json j;
  j["value"] = result.value;
  j["argmax_radius"] = result.argmax_radius;
  if (result.argmax_gamma.has_value()) j["argmax_gamma"] = *result.argmax_gamma;
  j["method"] = result.method;
  j["tolerance"] = result.tolerance;
  return j.dump();
}

std::string audit_report_to_json(const AuditReport& report) {
  nlohmann::json j;
  j["centered_value"] = report.centered_value;
  j["max_offcenter_value"] = report.max_offcenter_value;
  j["margin"] = report.margin;
  j["samples_used"] = report.samples_used;
  j["max_offcenter_stderr"] = report.max_offcenter_stderr;
  j["worst_center"] = report.worst_center;
  j["worst_radius"] = report.worst_radius;
  return j.dump();
}

}  // namespace mhl
