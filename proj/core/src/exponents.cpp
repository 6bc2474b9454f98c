#include "mhl/exponents.hpp"

#include <cctype>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace mhl {

namespace {

std::int64_t parse_int64(const std::string& text, const char* what) {
  if (text.empty()) throw std::invalid_argument(std::string("empty ") + what);
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(text, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("not an integer: '" + text + "'");
  }
  if (pos != text.size())
    throw std::invalid_argument("trailing characters in '" + text + "'");
  return v;
}

std::string trimmed(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace

Rational Rational::parse(const std::string& raw) {
  const std::string text = trimmed(raw);
  if (text.empty()) throw std::invalid_argument("empty rational");
  if (const auto slash = text.find('/'); slash != std::string::npos) {
    const std::int64_t num = parse_int64(text.substr(0, slash), "numerator");
    const std::int64_t den = parse_int64(text.substr(slash + 1), "denominator");
    return Rational(num, den);
  }
  if (const auto dot = text.find('.'); dot != std::string::npos) {
    // Finite decimals are exactly representable fractions; accept them.
    const std::string head = text.substr(0, dot);
    const std::string frac = text.substr(dot + 1);
    if (frac.empty() || frac.size() > 15)
      throw std::invalid_argument("unsupported decimal: '" + text + "'");
    const bool negative = !head.empty() && head[0] == '-';
    const std::int64_t whole = head.empty() || head == "-" ? 0 : parse_int64(head, "integer part");
    std::int64_t den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    const std::int64_t digits = parse_int64(frac, "fractional part");
    if (digits < 0) throw std::invalid_argument("malformed decimal: '" + text + "'");
    const std::int64_t mag = (whole < 0 ? -whole : whole);
    const Rational magnitude = Rational(mag) + Rational(digits, den);
    return negative ? -magnitude : magnitude;
  }
  return Rational(parse_int64(text, "integer"));
}

void ExponentPair::validate() const {
  if (p < Rational(1))
    throw std::invalid_argument("exponent pair: p = " + p.str() + " < 1");
  if (q < p)
    throw std::invalid_argument("exponent pair: q = " + q.str() + " < p = " + p.str());
}

void ExponentSystem::validate() const {
  if (dimension < 1) throw std::invalid_argument("exponent system: dimension < 1");
  if (factors.size() < 2) throw std::invalid_argument("exponent system: needs m >= 2 factors");
  target.validate();
  for (std::size_t i = 0; i < factors.size(); ++i) {
    try {
      factors[i].validate();
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("factor " + std::to_string(i + 1) + ": " + e.what());
    }
  }
}

Rational ExponentSystem::sum_inv_p() const {
  Rational sum(0);
  for (const auto& f : factors) sum = sum + f.p.reciprocal();
  return sum;
}

Rational ExponentSystem::sum_inv_q() const {
  Rational sum(0);
  for (const auto& f : factors) sum = sum + f.q.reciprocal();
  return sum;
}

ConditionReport check_holder_exponents(const ExponentSystem& system) {
  system.validate();
  ConditionReport report;
  report.sum_inv_p = system.sum_inv_p();
  report.sum_inv_q = system.sum_inv_q();
  report.p_star = report.sum_inv_p.reciprocal();
  report.q_slack = system.target.q.reciprocal() - report.sum_inv_q;
  report.p_slack = system.target.p.reciprocal() - report.sum_inv_p;
  report.q_condition_holds = report.q_slack == Rational(0);
  report.p_condition_holds = report.p_slack >= Rational(0);
  return report;
}

Rational parse_exponent(const std::string& text) { return Rational::parse(text); }

std::vector<ExponentPair> parse_factor_list(const std::string& text) {
  std::vector<ExponentPair> factors;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trimmed(item);
    if (item.empty()) continue;
    if (const auto colon = item.find(':'); colon != std::string::npos) {
      factors.emplace_back(Rational::parse(item.substr(0, colon)),
                           Rational::parse(item.substr(colon + 1)));
    } else if (const auto slash = item.find('/'); slash != std::string::npos) {
      factors.emplace_back(Rational::parse(item.substr(0, slash)),
                           Rational::parse(item.substr(slash + 1)));
    } else {
      // "p" alone means p = q (the Lebesgue case).
      const Rational p = Rational::parse(item);
      factors.emplace_back(p, p);
    }
  }
  if (factors.empty()) throw std::invalid_argument("empty factor list");
  return factors;
}

std::string condition_report_to_json(const ConditionReport& report) {
  nlohmann::json j;
  j["q_condition_holds"] = report.q_condition_holds;
  j["p_condition_holds"] = report.p_condition_holds;
  j["sum_inv_p"] = report.sum_inv_p.str();
  j["sum_inv_q"] = report.sum_inv_q.str();
  j["p_star"] = report.p_star.str();
  j["q_slack"] = report.q_slack.str();
  j["p_slack"] = report.p_slack.str();
  return j.dump();
}

}  // namespace mhl
