#include "mhl/phi.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <stdexcept>

#include <json.hpp>

namespace mhl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string describe_grid(std::span<const double> grid) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%zu points over [%.6g, %.6g]", grid.size(),
                grid.empty() ? 0.0 : grid.front(), grid.empty() ? 0.0 : grid.back());
  return buf;
}

/// Largest ratio g(s)/g(r) over grid pairs r < s, clamped below at 1.
/// Finite for any positive g on a finite grid; 1 means monotone decreasing.
template <typename G>
double almost_decreasing_constant_on(std::span<const double> grid, G&& g) {
  double worst = 1.0;
  double running_min = kInf;
  for (double r : grid) {
    const double v = g(r);
    if (running_min < kInf) worst = std::max(worst, v / running_min);
    running_min = std::min(running_min, v);
  }
  return worst;
}

template <typename G>
double almost_increasing_constant_on(std::span<const double> grid, G&& g) {
  double worst = 1.0;
  double running_max = 0.0;
  for (double r : grid) {
    const double v = g(r);
    if (running_max > 0.0) worst = std::max(worst, running_max / v);
    running_max = std::max(running_max, v);
  }
  return worst;
}

}  // namespace

PhiSpec PhiSpec::power(Rational a) {
  PhiSpec spec;
  spec.is_power_ = true;
  spec.exponent_ = a;
  return spec;
}

PhiSpec PhiSpec::table(std::vector<std::pair<double, double>> knots) {
  if (knots.size() < 2) throw std::invalid_argument("phi table: needs >= 2 knots");
  std::sort(knots.begin(), knots.end());
  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (!(knots[i].first > 0.0) || !(knots[i].second > 0.0))
      throw std::invalid_argument("phi table: knot " + std::to_string(i + 1) +
                                  " must have positive r and value");
    if (i > 0 && !(knots[i].first > knots[i - 1].first))
      throw std::invalid_argument("phi table: knots must be strictly increasing in r");
  }
  PhiSpec spec;
  spec.is_power_ = false;
  spec.knots_ = std::move(knots);
  spec.log_r_.reserve(spec.knots_.size());
  spec.log_v_.reserve(spec.knots_.size());
  for (const auto& [r, v] : spec.knots_) {
    spec.log_r_.push_back(std::log(r));
    spec.log_v_.push_back(std::log(v));
  }
  return spec;
}

const Rational& PhiSpec::power_exponent() const {
  if (!is_power_) throw std::logic_error("phi: not a power spec");
  return exponent_;
}

double PhiSpec::operator()(double r) const {
  if (!(r > 0.0)) throw std::invalid_argument("phi: r must be > 0");
  if (is_power_) return std::pow(r, -exponent_.to_double());
  const double x = std::log(r);
  const std::size_t n = log_r_.size();
  std::size_t hi = std::upper_bound(log_r_.begin(), log_r_.end(), x) - log_r_.begin();
  // Boundary segments also supply the extrapolation slope.
  if (hi == 0) hi = 1;
  if (hi == n) hi = n - 1;
  const std::size_t lo = hi - 1;
  const double slope = (log_v_[hi] - log_v_[lo]) / (log_r_[hi] - log_r_[lo]);
  return std::exp(log_v_[lo] + slope * (x - log_r_[lo]));
}

double PhiSpec::max_upward_loglog_slope() const {
  if (is_power_) return std::max(0.0, -exponent_.to_double());
  double worst = 0.0;
  for (std::size_t i = 1; i < log_r_.size(); ++i) {
    worst = std::max(worst, (log_v_[i] - log_v_[i - 1]) / (log_r_[i] - log_r_[i - 1]));
  }
  return worst;
}

std::string PhiSpec::digest() const {
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(fnv1a(phi_to_json(*this))));
  return hex;
}

double eval_phi(const PhiSpec& spec, double r) { return spec(r); }

std::vector<double> default_phi_grid() {
  constexpr int n = 512;
  std::vector<double> grid(n);
  const double lo = std::log(1e-4), hi = std::log(1e4);
  for (int i = 0; i < n; ++i) grid[i] = std::exp(lo + (hi - lo) * i / (n - 1));
  return grid;
}

GpReport check_G_p(const PhiSpec& spec, const Rational& p, int d,
                   std::span<const double> grid) {
  if (p < Rational(1)) throw std::invalid_argument("check_G_p: p must be >= 1");
  if (d < 1) throw std::invalid_argument("check_G_p: dimension < 1");
  if (grid.empty()) throw std::invalid_argument("check_G_p: empty grid");

  GpReport report;
  report.p = p;
  report.d = d;
  const double dp = static_cast<double>(d) / p.to_double();

  if (spec.is_power()) {
    // phi(r) = r^{-a}: almost decreasing iff a >= 0, r^{d/p} phi almost
    // increasing iff a <= d/p, both with constant 1; doubling 2^{|a|}.
    const Rational a = spec.power_exponent();
    const double ad = a.to_double();
    const bool dec_ok = a >= Rational(0);
    const bool inc_ok = a * p <= Rational(d);
    report.almost_decreasing_constant = dec_ok ? 1.0 : kInf;
    report.almost_increasing_constant = inc_ok ? 1.0 : kInf;
    report.doubling_constant = std::pow(2.0, std::abs(ad));
    report.member = dec_ok && inc_ok;
    report.grid = "analytic (power)";
    return report;
  }

  report.almost_decreasing_constant =
      almost_decreasing_constant_on(grid, [&](double r) { return spec(r); });
  report.almost_increasing_constant = almost_increasing_constant_on(
      grid, [&](double r) { return std::pow(r, dp) * spec(r); });
  double doubling = 1.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    for (std::size_t i = j; i < grid.size() && grid[i] <= 2.0 * grid[j] * (1 + 1e-12); ++i) {
      const double ratio = spec(grid[i]) / spec(grid[j]);
      doubling = std::max({doubling, ratio, 1.0 / ratio});
    }
  }
  report.doubling_constant = doubling;
  report.member = std::isfinite(report.almost_decreasing_constant) &&
                  std::isfinite(report.almost_increasing_constant);
  report.grid = describe_grid(grid);
  return report;
}

EpsDecreasingReport check_eps_almost_decreasing(const PhiSpec& spec, const Rational& p,
                                                double eps, std::span<const double> grid) {
  if (!(eps > 0.0)) throw std::invalid_argument("check_eps_almost_decreasing: eps must be > 0");
  EpsDecreasingReport report;
  report.eps = eps;
  const double ep = eps / p.to_double();
  if (spec.is_power()) {
    // r^{eps/p} r^{-a} is almost decreasing iff eps/p <= a.
    report.holds = ep <= spec.power_exponent().to_double() + 1e-15;
    report.constant = report.holds ? 1.0 : kInf;
    report.grid = "analytic (power)";
    return report;
  }
  if (grid.empty()) throw std::invalid_argument("check_eps_almost_decreasing: empty grid");
  report.constant = almost_decreasing_constant_on(
      grid, [&](double r) { return std::pow(r, ep) * spec(r); });
  report.holds = std::isfinite(report.constant);
  report.grid = describe_grid(grid);
  return report;
}

PhiSpec product_phi(std::span<const PhiSpec> specs) {
  if (specs.empty()) throw std::invalid_argument("product_phi: empty list");
  const bool all_power = std::all_of(specs.begin(), specs.end(),
                                     [](const PhiSpec& s) { return s.is_power(); });
  if (all_power) {
    Rational sum(0);
    for (const PhiSpec& s : specs) sum = sum + s.power_exponent();
    return PhiSpec::power(sum);
  }
  std::set<double> rs;
  for (const PhiSpec& s : specs) {
    for (const auto& [r, v] : s.knots()) rs.insert(r);
  }
  std::vector<std::pair<double, double>> knots;
  for (double r : rs) {
    double v = 1.0;
    for (const PhiSpec& s : specs) v *= s(r);
    knots.emplace_back(r, v);
  }
  return PhiSpec::table(std::move(knots));
}

PhiSpec phi_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("phi JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("type"))
    throw std::invalid_argument("phi JSON: missing field 'type'");
  const std::string type = j["type"].get<std::string>();
  if (type == "power") {
    if (!j.contains("a")) throw std::invalid_argument("phi JSON: power needs field 'a'");
    const auto& a = j["a"];
    if (a.is_string()) return PhiSpec::power(Rational::parse(a.get<std::string>()));
    if (a.is_number_integer()) return PhiSpec::power(Rational(a.get<std::int64_t>()));
    throw std::invalid_argument("phi JSON: field 'a' must be a rational string or integer");
  }
  if (type == "table") {
    if (!j.contains("knots") || !j["knots"].is_array())
      throw std::invalid_argument("phi JSON: table needs array field 'knots'");
    std::vector<std::pair<double, double>> knots;
    for (const auto& k : j["knots"]) {
      if (!k.is_array() || k.size() != 2)
        throw std::invalid_argument("phi JSON: each knot must be [r, value]");
      knots.emplace_back(k[0].get<double>(), k[1].get<double>());
    }
    return PhiSpec::table(std::move(knots));
  }
  throw std::invalid_argument("phi JSON: unknown type '" + type + "'");
}

std::string phi_to_json(const PhiSpec& spec) {
  nlohmann::json j;
  if (spec.is_power()) {
    j["type"] = "power";
    j["a"] = spec.power_exponent().str();
  } else {
    j["type"] = "table";
    j["knots"] = nlohmann::json::array();
    for (const auto& [r, v] : spec.knots()) j["knots"].push_back({r, v});
  }
  return j.dump();
}

namespace {
nlohmann::json finite_or_marker(double v) {
  if (std::isfinite(v)) return v;
  return "unbounded";
}
}  // namespace

std::string gp_report_to_json(const GpReport& report) {
  nlohmann::json j;
  j["p"] = report.p.str();
  j["d"] = report.d;
  j["almost_decreasing_constant"] = finite_or_marker(report.almost_decreasing_constant);
  j["almost_increasing_constant"] = finite_or_marker(report.almost_increasing_constant);
  j["doubling_constant"] = report.doubling_constant;
  j["member"] = report.member;
  j["grid"] = report.grid;
  return j.dump();
}

std::string eps_report_to_json(const EpsDecreasingReport& report) {
  nlohmann::json j;
  j["eps"] = report.eps;
  j["constant"] = finite_or_marker(report.constant);
  j["holds"] = report.holds;
  j["grid"] = report.grid;
  return j.dump();
}

}  // namespace mhl
