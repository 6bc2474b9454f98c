#include "mhl/falsify.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "mhl/parallel.hpp"

namespace mhl {

namespace {

constexpr double kSpreadThreshold = 10.0;
// Fitted log-log slopes below this are treated as flat: finite-K transients
// on bounded series stay around 1e-4, diverging series sit at 0.1 and up.
constexpr double kSlopeFloor = 0.01;

double min_eps_bound(const ExponentSystem& system) {
  Rational best = system.factors.front().p / system.factors.front().q;
  for (const auto& f : system.factors) {
    const Rational ratio = f.p / f.q;
    if (ratio < best) best = ratio;
  }
  return static_cast<double>(system.dimension) * best.to_double();
}

/// Least-squares slope of log(ratio) against log(param) over the tail half
/// of the rows (the bounds are asymptotic; small parameters are transient).
double fit_tail_slope(const std::vector<DivergenceRow>& rows) {
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = rows.size() / 2; i < rows.size(); ++i) {
    if (rows[i].ratio > 0.0 && rows[i].param > 0.0)
      pts.emplace_back(std::log(rows[i].param), std::log(rows[i].ratio));
  }
  if (pts.size() < 2) return 0.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(pts.size());
  const double denom = n * sxx - sx * sx;
  if (denom <= 0.0) return 0.0;
  return (n * sxy - sx * sy) / denom;
}

double ratio_spread(const std::vector<DivergenceRow>& rows) {
  double lo = 0.0, hi = 0.0;
  for (const auto& row : rows) {
    if (row.ratio <= 0.0) continue;
    if (lo == 0.0 || row.ratio < lo) lo = row.ratio;
    hi = std::max(hi, row.ratio);
  }
  return lo > 0.0 ? hi / lo : 1.0;
}

bool degenerate_params(const std::vector<DivergenceRow>& rows) {
  std::set<double> distinct;
  for (const auto& row : rows) distinct.insert(row.param);
  return distinct.size() < 2;
}

/// K-series verdicts rest on the fitted slope alone: the ratio grows like
/// K^s with s well under 1, so no desk-scale K range can spread by a factor
/// 10, while the slope is sharply resolved. Radius series spread across the
/// full range and must also clear the spread threshold.
void finish_report(DivergenceReport& report, bool k_series) {
  report.fitted_slope = fit_tail_slope(report.rows);
  report.ratio_spread = ratio_spread(report.rows);
  if (degenerate_params(report.rows) || report.rows.size() < 2) {
    report.verdict = Verdict::inconclusive;
    return;
  }
  if (k_series) {
    report.verdict = report.fitted_slope > kSlopeFloor ? Verdict::diverges : Verdict::bounded;
  } else {
    const bool spread_ok = report.ratio_spread >= kSpreadThreshold * (1.0 - 1e-12);
    report.verdict = (spread_ok && std::abs(report.fitted_slope) > kSlopeFloor)
                         ? Verdict::diverges
                         : Verdict::bounded;
  }
}

}  // namespace

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::diverges: return "diverges";
    case Verdict::bounded: return "bounded";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

RadialStepFunction make_g_eps_K(double eps, int K, int d) {
  if (!(eps > 0.0)) throw std::invalid_argument("make_g_eps_K: eps must be > 0");
  if (K < 1) throw std::invalid_argument("make_g_eps_K: K must be >= 1");
  std::vector<Shell> shells;
  shells.reserve(K + 1);
  shells.push_back({0.0, 1.0, 1.0, true, false});
  for (int j = 1; j <= K; ++j) {
    const double jd = static_cast<double>(j);
    shells.push_back({jd, jd + std::pow(jd, -eps), 1.0, true, true});
  }
  return RadialStepFunction(d, std::move(shells));
}

RadialStepFunction make_g_eps_K(const CounterexampleParams& params) {
  return make_g_eps_K(params.epsilon, params.K, params.dimension);
}

double choose_epsilon(const ExponentSystem& system) {
  system.validate();
  return 0.5 * min_eps_bound(system);
}

DivergenceReport q_scaling_series(const ExponentSystem& system,
                                  const std::vector<double>& radii) {
  system.validate();
  if (radii.empty()) throw std::invalid_argument("q_scaling_series: empty radii");
  DivergenceReport report;
  report.mode = "q";
  const int d = system.dimension;
  report.predicted_slope =
      d * (system.target.q.reciprocal() - system.sum_inv_q()).to_double();
  report.rows.resize(radii.size());
  parallel_for(radii.size(), [&](std::size_t i) {
    const double R = radii[i];
    const RadialStepFunction chi = indicator_ball(R, d);
    DivergenceRow row;
    row.param = R;
    row.lhs = morrey_norm(chi, system.target.p, system.target.q).value;
    row.rhs = 1.0;
    for (const auto& pair : system.factors)
      row.rhs *= morrey_norm(chi, pair.p, pair.q).value;
    row.ratio = row.lhs / row.rhs;
    report.rows[i] = row;
  });
  std::sort(report.rows.begin(), report.rows.end(),
            [](const DivergenceRow& a, const DivergenceRow& b) { return a.param < b.param; });
  // Radius series diverge at R -> 0 or R -> infinity depending on the sign
  // of the exponent defect, so slope evidence counts in either direction.
  finish_report(report, /*k_series=*/false);
  return report;
}

namespace {

DivergenceReport p_series_impl(const ExponentSystem& system,
                               const std::vector<int>& K_values,
                               std::optional<double> eps_opt, bool weak) {
  system.validate();
  if (K_values.empty()) throw std::invalid_argument("p series: empty K list");
  const auto conditions = check_holder_exponents(system);
  if (!conditions.q_condition_holds)
    throw std::invalid_argument(
        "p series: the q-condition fails for this system; the ratio scales with R, "
        "use q_scaling_series instead");

  const double eps = eps_opt.value_or(choose_epsilon(system));
  const double bound = min_eps_bound(system);
  if (!(eps > 0.0) || !(eps < bound))
    throw std::invalid_argument("p series: eps must lie in (0, " + std::to_string(bound) +
                                ") for this system");

  DivergenceReport report;
  report.mode = weak ? "weak-p" : "p";
  report.predicted_slope =
      eps * (system.sum_inv_p() - system.target.p.reciprocal()).to_double();
  const double m = static_cast<double>(system.factors.size());
  const int d = system.dimension;

  report.rows.resize(K_values.size());
  parallel_for(K_values.size(), [&](std::size_t i) {
    const int K = K_values[i];
    const RadialStepFunction g = make_g_eps_K(eps, K, d);
    DivergenceRow row;
    row.param = static_cast<double>(K);
    // g is {0,1}-valued, so the product of m copies is g itself.
    row.lhs = weak ? weak_morrey_norm(g, system.target.p, system.target.q).value
                   : morrey_norm(g, system.target.p, system.target.q).value;
    row.rhs = weak ? m : 1.0;
    for (const auto& pair : system.factors)
      row.rhs *= weak ? weak_morrey_norm(g, pair.p, pair.q).value
                      : morrey_norm(g, pair.p, pair.q).value;
    row.ratio = row.lhs / row.rhs;
    report.rows[i] = row;
  });
  std::sort(report.rows.begin(), report.rows.end(),
            [](const DivergenceRow& a, const DivergenceRow& b) { return a.param < b.param; });
  // The K-series diverges only as K grows, so only positive slopes count.
  finish_report(report, /*k_series=*/true);
  return report;
}

}  // namespace

DivergenceReport p_divergence_series(const ExponentSystem& system,
                                     const std::vector<int>& K_values,
                                     std::optional<double> eps) {
  return p_series_impl(system, K_values, eps, /*weak=*/false);
}

DivergenceReport weak_p_divergence_series(const ExponentSystem& system,
                                          const std::vector<int>& K_values,
                                          std::optional<double> eps) {
  return p_series_impl(system, K_values, eps, /*weak=*/true);
}

DivergenceReport phi_necessity_series(const Rational& p,
                                      const std::vector<Rational>& factor_ps,
                                      const PhiSpec& phi,
                                      const std::vector<PhiSpec>& factor_phis,
                                      const std::vector<double>& radii, bool weak,
                                      const OracleConfig& cfg) {
  if (factor_ps.size() != factor_phis.size())
    throw std::invalid_argument("phi series: factor p count != factor phi count");
  if (factor_ps.size() < 2) throw std::invalid_argument("phi series: needs m >= 2 factors");
  if (radii.empty()) throw std::invalid_argument("phi series: empty radii");

  DivergenceReport report;
  report.mode = weak ? "weak-phi" : "phi";
  const double m = static_cast<double>(factor_ps.size());

  // For power weights the analytic ratio prod phi_i / phi is the pure power
  // r^{a - sum a_i}; its log-log slope is the predicted slope.
  if (phi.is_power() &&
      std::all_of(factor_phis.begin(), factor_phis.end(),
                  [](const PhiSpec& s) { return s.is_power(); })) {
    Rational sum(0);
    for (const auto& s : factor_phis) sum = sum + s.power_exponent();
    report.predicted_slope = (phi.power_exponent() - sum).to_double();
  } else {
    std::vector<double> sorted = radii;
    std::sort(sorted.begin(), sorted.end());
    const double r0 = sorted.front(), r1 = sorted.back();
    if (r1 > r0) {
      auto analytic = [&](double r) {
        double prod = 1.0;
        for (const auto& s : factor_phis) prod *= s(r);
        return prod / phi(r);
      };
      report.predicted_slope = std::log(analytic(r1) / analytic(r0)) / std::log(r1 / r0);
    }
  }

  const int d = 1;  // chi-ball ratios scale identically in every dimension; d=1 keeps it exact
  report.rows.resize(radii.size());
  parallel_for(radii.size(), [&](std::size_t i) {
    const double R = radii[i];
    const RadialStepFunction chi = indicator_ball(R, d);
    DivergenceRow row;
    row.param = R;
    row.lhs = weak ? generalized_weak_morrey_norm(chi, p, phi, cfg).value
                   : generalized_morrey_norm(chi, p, phi, cfg).value;
    row.rhs = weak ? m : 1.0;
    for (std::size_t k = 0; k < factor_ps.size(); ++k)
      row.rhs *= weak
          ? generalized_weak_morrey_norm(chi, factor_ps[k], factor_phis[k], cfg).value
          : generalized_morrey_norm(chi, factor_ps[k], factor_phis[k], cfg).value;
    row.ratio = row.lhs / row.rhs;
    double prod = 1.0;
    for (const auto& s : factor_phis) prod *= s(R);
    row.analytic_ratio = prod / phi(R);
    report.rows[i] = row;
  });
  std::sort(report.rows.begin(), report.rows.end(),
            [](const DivergenceRow& a, const DivergenceRow& b) { return a.param < b.param; });

  report.fitted_slope = fit_tail_slope(report.rows);
  report.ratio_spread = ratio_spread(report.rows);
  // The verdict follows the analytic ratio: unbounded means its spread over
  // the radius range exceeds the threshold factor.
  double lo = 0.0, hi = 0.0;
  for (const auto& row : report.rows) {
    const double a = row.analytic_ratio.value_or(0.0);
    if (a <= 0.0) continue;
    if (lo == 0.0 || a < lo) lo = a;
    hi = std::max(hi, a);
  }
  if (degenerate_params(report.rows) || lo == 0.0) {
    report.verdict = Verdict::inconclusive;
  } else {
    report.verdict = hi / lo >= kSpreadThreshold * (1.0 - 1e-12) ? Verdict::diverges
                                                                 : Verdict::bounded;
  }
  return report;
}

std::string divergence_report_to_csv(const DivergenceReport& report) {
  std::ostringstream out;
  out << "param,lhs,rhs,ratio\n";
  out.precision(17);
  for (const auto& row : report.rows) {
    out << row.param << ',' << row.lhs << ',' << row.rhs << ',' << row.ratio << '\n';
  }
  return out.str();
}

std::string divergence_report_to_json(const DivergenceReport& report) {
  nlohmann::json j;
  j["mode"] = report.mode;
  j["rows"] = nlohmann::json::array();
  for (const auto& row : report.rows) {
    nlohmann::json r = {{"param", row.param},
                        {"lhs", row.lhs},
                        {"rhs", row.rhs},
                        {"ratio", row.ratio}};
    if (row.analytic_ratio.has_value()) r["analytic_ratio"] = *row.analytic_ratio;
    j["rows"].push_back(r);
  }
  j["fitted_slope"] = report.fitted_slope;
  j["predicted_slope"] = report.predicted_slope;
  j["ratio_spread"] = report.ratio_spread;
  j["verdict"] = verdict_name(report.verdict);
  return j.dump();
}

std::vector<int> default_K_series(int K_max) {
  if (K_max < 1) throw std::invalid_argument("K series: K_max must be >= 1");
  const int lo = std::max(1, K_max / 100);
  std::set<int> ks;
  const int points = 5;
  for (int i = 0; i < points; ++i) {
    const double x = std::log(lo) + (std::log(K_max) - std::log(lo)) * i / (points - 1);
    ks.insert(static_cast<int>(std::lround(std::exp(x))));
  }
  return {ks.begin(), ks.end()};
}

}  // namespace mhl
