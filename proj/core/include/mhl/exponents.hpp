#pragma once

#include <string>
#include <vector>

#include "mhl/rational.hpp"

namespace mhl {

/// A Morrey exponent pair with 1 <= p <= q < infinity.
struct ExponentPair {
  Rational p;
  Rational q;

  ExponentPair(Rational p_, Rational q_) : p(p_), q(q_) { validate(); }
  void validate() const;
};

/// The data of a generalized Hoelder inequality instance: a target pair
/// (p, q), m >= 2 factor pairs (p_i, q_i), and the ambient dimension.
struct ExponentSystem {
  ExponentPair target;
  std::vector<ExponentPair> factors;
  int dimension = 1;

  ExponentSystem(ExponentPair target_, std::vector<ExponentPair> factors_, int dimension_)
      : target(target_), factors(std::move(factors_)), dimension(dimension_) {
    validate();
  }
  void validate() const;

  std::size_t factor_count() const { return factors.size(); }
  Rational sum_inv_p() const;
  Rational sum_inv_q() const;
};

/// Exact evaluation of the two exponent conditions
///   sum 1/q_i = 1/q   and   sum 1/p_i <= 1/p.
struct ConditionReport {
  bool q_condition_holds = false;
  bool p_condition_holds = false;
  Rational sum_inv_p;
  Rational sum_inv_q;
  Rational p_star;  // 1 / sum_inv_p
  Rational q_slack; // 1/q - sum 1/q_i
  Rational p_slack; // 1/p - sum 1/p_i

  bool both_hold() const { return q_condition_holds && p_condition_holds; }
};

ConditionReport check_holder_exponents(const ExponentSystem& system);

/// "a/b" or "a" (also finite decimals); used by the CLI and the JSON formats.
Rational parse_exponent(const std::string& text);

/// "p1/q1,p2/q2,..." with integer entries, or "p1:q1,p2:q2,..." where each
/// half may itself be a rational string.
std::vector<ExponentPair> parse_factor_list(const std::string& text);

std::string condition_report_to_json(const ConditionReport& report);

}  // namespace mhl
