#include "mhl/radial.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <stdexcept>

#include <json.hpp>

namespace mhl {

namespace {

constexpr double kMergeRelTol = 1e-12;

bool touching(double left_outer, double right_inner) {
  const double scale = std::max({1.0, std::abs(left_outer), std::abs(right_inner)});
  return std::abs(right_inner - left_outer) <= kMergeRelTol * scale;
}

double capped_shell_measure(int d, double inner, double outer, double r) {
  const double hi = std::min(outer, r);
  const double lo = std::min(inner, r);
  if (hi <= lo) return 0.0;
  return unit_ball_volume(d) * (std::pow(hi, d) - std::pow(lo, d));
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

double splitmix64_unit(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  z = z ^ (z >> 31);
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

}  // namespace

double unit_ball_volume(int d) {
  if (d < 1) throw std::invalid_argument("unit_ball_volume: dimension < 1");
  // v_d = v_{d-2} * 2*pi/d with v_0 = 1, v_1 = 2.
  double v = (d % 2 == 0) ? 1.0 : 2.0;
  for (int k = (d % 2 == 0) ? 2 : 3; k <= d; k += 2) {
    v *= 2.0 * M_PI / k;
  }
  return v;
}

double ball_volume(int d, double radius) {
  if (radius <= 0) return 0.0;
  return unit_ball_volume(d) * std::pow(radius, d);
}

RadialStepFunction::RadialStepFunction(int dimension, std::vector<Shell> shells)
    : dimension_(dimension) {
  if (dimension < 1) throw std::invalid_argument("function: dimension < 1");
  for (std::size_t i = 0; i < shells.size(); ++i) {
    const Shell& s = shells[i];
    const std::string where = "shell " + std::to_string(i + 1);
    if (!(s.inner >= 0.0)) throw std::invalid_argument(where + ": inner < 0");
    if (!(s.outer > s.inner)) throw std::invalid_argument(where + ": outer <= inner");
    if (!std::isfinite(s.outer)) throw std::invalid_argument(where + ": outer not finite");
    if (!(s.value >= 0.0) || !std::isfinite(s.value))
      throw std::invalid_argument(where + ": value must be finite and >= 0");
  }
  std::erase_if(shells, [](const Shell& s) { return s.value == 0.0; });
  std::sort(shells.begin(), shells.end(),
            [](const Shell& a, const Shell& b) { return a.inner < b.inner; });
  for (std::size_t i = 1; i < shells.size(); ++i) {
    if (shells[i].inner < shells[i - 1].outer &&
        !touching(shells[i - 1].outer, shells[i].inner)) {
      throw std::invalid_argument("shell " + std::to_string(i + 1) +
                                  ": overlaps previous shell");
    }
  }
  // Merge shells that touch (up to measure zero) with equal values.
  std::vector<Shell> merged;
  for (const Shell& s : shells) {
    if (!merged.empty() && merged.back().value == s.value &&
        touching(merged.back().outer, s.inner)) {
      merged.back().outer = std::max(merged.back().outer, s.outer);
      merged.back().outer_closed = s.outer_closed;
    } else {
      merged.push_back(s);
    }
  }
  shells_ = std::move(merged);
}

double RadialStepFunction::max_radius() const {
  return shells_.empty() ? 0.0 : shells_.back().outer;
}

double RadialStepFunction::min_positive_breakpoint() const {
  if (shells_.empty()) return 0.0;
  return shells_.front().inner > 0.0 ? shells_.front().inner : shells_.front().outer;
}

double RadialStepFunction::max_value() const {
  double v = 0.0;
  for (const Shell& s : shells_) v = std::max(v, s.value);
  return v;
}

double RadialStepFunction::value_at(double radius) const {
  for (const Shell& s : shells_) {
    if (radius >= s.inner && radius < s.outer) return s.value;
    if (s.inner > radius) break;
  }
  return 0.0;
}

std::vector<double> RadialStepFunction::distinct_values_descending() const {
  std::set<double> values;
  for (const Shell& s : shells_) values.insert(s.value);
  return {values.rbegin(), values.rend()};
}

RadialStepFunction RadialStepFunction::superlevel_indicator(double level) const {
  std::vector<Shell> kept;
  for (const Shell& s : shells_) {
    if (s.value >= level) kept.push_back({s.inner, s.outer, 1.0, s.inner_closed, s.outer_closed});
  }
  return RadialStepFunction(dimension_, std::move(kept));
}

RadialStepFunction RadialStepFunction::scaled(double c) const {
  if (!(c >= 0.0)) throw std::invalid_argument("scaled: factor must be >= 0");
  std::vector<Shell> out = shells_;
  for (Shell& s : out) s.value *= c;
  return RadialStepFunction(dimension_, std::move(out));
}

RadialStepFunction RadialStepFunction::dilated(double lambda) const {
  if (!(lambda > 0.0)) throw std::invalid_argument("dilated: lambda must be > 0");
  std::vector<Shell> out = shells_;
  for (Shell& s : out) {
    s.inner /= lambda;
    s.outer /= lambda;
  }
  return RadialStepFunction(dimension_, std::move(out));
}

std::string RadialStepFunction::digest() const {
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(fnv1a(function_to_json(*this))));
  return hex;
}

double ball_integral_power(const RadialStepFunction& f, const Rational& p, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("ball_integral_power: r must be > 0");
  const double pd = p.to_double();
  double total = 0.0;
  for (const Shell& s : f.shells()) {
    if (s.inner >= r) break;
    total += std::pow(s.value, pd) * capped_shell_measure(f.dimension(), s.inner, s.outer, r);
  }
  return total;
}

double superlevel_measure(const RadialStepFunction& f, double gamma, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("superlevel_measure: r must be > 0");
  if (!(gamma >= 0.0)) throw std::invalid_argument("superlevel_measure: gamma must be >= 0");
  double total = 0.0;
  for (const Shell& s : f.shells()) {
    if (s.inner >= r) break;
    if (s.value > gamma)
      total += capped_shell_measure(f.dimension(), s.inner, s.outer, r);
  }
  return total;
}

RadialStepFunction pointwise_product(const RadialStepFunction& f,
                                     const RadialStepFunction& g) {
  if (f.dimension() != g.dimension())
    throw std::invalid_argument("pointwise_product: dimension mismatch");
  // Refine on the merged breakpoints; the product is constant on each piece.
  std::set<double> cuts;
  for (const Shell& s : f.shells()) { cuts.insert(s.inner); cuts.insert(s.outer); }
  for (const Shell& s : g.shells()) { cuts.insert(s.inner); cuts.insert(s.outer); }
  std::vector<double> sorted(cuts.begin(), cuts.end());
  std::vector<Shell> out;
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
    const double lo = sorted[i], hi = sorted[i + 1];
    if (hi - lo <= 1e-13 * std::max(1.0, hi)) continue;  // breakpoint jitter
    const double mid = 0.5 * (lo + hi);
    const double v = f.value_at(mid) * g.value_at(mid);
    if (v > 0.0) out.push_back({lo, hi, v, true, false});
  }
  return RadialStepFunction(f.dimension(), std::move(out));
}

RadialStepFunction indicator_ball(double R, int d) {
  if (!(R > 0.0)) throw std::invalid_argument("indicator_ball: R must be > 0");
  return RadialStepFunction(d, {{0.0, R, 1.0, true, false}});
}

double offcenter_integral_1d(const RadialStepFunction& f, double a, double r,
                             const Rational& p) {
  if (f.dimension() != 1)
    throw std::invalid_argument("offcenter_integral_1d: dimension must be 1");
  if (!(r > 0.0)) throw std::invalid_argument("offcenter_integral_1d: r must be > 0");
  const double lo = a - r, hi = a + r;
  const double pd = p.to_double();
  double total = 0.0;
  for (const Shell& s : f.shells()) {
    // The shell realizes as (-outer, -inner) and (inner, outer) on the line.
    const double wp = std::pow(s.value, pd);
    const double right = std::max(0.0, std::min(hi, s.outer) - std::max(lo, s.inner));
    const double left = std::max(0.0, std::min(hi, -s.inner) - std::max(lo, -s.outer));
    total += wp * (right + left);
  }
  return total;
}

McIntegral offcenter_integral_mc_2d(const RadialStepFunction& f, double a, double r,
                                    const Rational& p, int samples, std::uint64_t seed) {
  if (f.dimension() != 2)
    throw std::invalid_argument("offcenter_integral_mc_2d: dimension must be 2");
  if (!(r > 0.0)) throw std::invalid_argument("offcenter_integral_mc_2d: r must be > 0");
  if (samples < 16) throw std::invalid_argument("offcenter_integral_mc_2d: too few samples");
  const double pd = p.to_double();
  std::uint64_t state = seed;
  double sum = 0.0, sum_sq = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double rho = r * std::sqrt(splitmix64_unit(state));
    const double theta = 2.0 * M_PI * splitmix64_unit(state);
    const double x = a + rho * std::cos(theta);
    const double y = rho * std::sin(theta);
    const double fv = f.value_at(std::hypot(x, y));
    const double fp = fv > 0.0 ? std::pow(fv, pd) : 0.0;
    sum += fp;
    sum_sq += fp * fp;
  }
  const double ball = M_PI * r * r;
  const double mean = sum / samples;
  const double var = std::max(0.0, sum_sq / samples - mean * mean);
  McIntegral out;
  out.value = ball * mean;
  out.stderr_ = ball * std::sqrt(var / samples);
  return out;
}

RadialStepFunction function_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("function JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("dim"))
    throw std::invalid_argument("function JSON: missing field 'dim'");
  if (!j.contains("shells") || !j["shells"].is_array())
    throw std::invalid_argument("function JSON: missing array field 'shells'");
  const int dim = j["dim"].get<int>();
  std::vector<Shell> shells;
  for (const auto& js : j["shells"]) {
    for (const char* field : {"inner", "outer", "value"}) {
      if (!js.contains(field) || !js[field].is_number())
        throw std::invalid_argument(std::string("function JSON: shell missing numeric field '") +
                                    field + "'");
    }
    Shell s;
    s.inner = js["inner"].get<double>();
    s.outer = js["outer"].get<double>();
    s.value = js["value"].get<double>();
    if (js.contains("inner_closed")) s.inner_closed = js["inner_closed"].get<bool>();
    if (js.contains("outer_closed")) s.outer_closed = js["outer_closed"].get<bool>();
    shells.push_back(s);
  }
  return RadialStepFunction(dim, std::move(shells));
}

std::string function_to_json(const RadialStepFunction& f) {
  nlohmann::json j;
  j["dim"] = f.dimension();
  j["shells"] = nlohmann::json::array();
  for (const Shell& s : f.shells()) {
    j["shells"].push_back({{"inner", s.inner}, {"outer", s.outer}, {"value", s.value}});
  }
  return j.dump();
}

}  // namespace mhl
