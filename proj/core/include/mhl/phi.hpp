#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mhl/rational.hpp"

namespace mhl {

/// A positive weight phi: (0, inf) -> (0, inf), either a pure power
/// phi(r) = r^{-a} or a table of (r, phi(r)) knots interpolated linearly in
/// log-log coordinates, with the boundary slopes continued beyond the knots.
class PhiSpec {
 public:
  static PhiSpec power(Rational a);
  static PhiSpec table(std::vector<std::pair<double, double>> knots);

  bool is_power() const { return is_power_; }
  const Rational& power_exponent() const;
  const std::vector<std::pair<double, double>>& knots() const { return knots_; }

  double operator()(double r) const;

  /// Largest upward slope of log phi against log r over the knot segments
  /// (0 for any nonincreasing table and for powers with a >= 0). Used for
  /// grid-resolution bounds.
  double max_upward_loglog_slope() const;

  std::string digest() const;

 private:
  PhiSpec() = default;
  bool is_power_ = true;
  Rational exponent_;                            // power: phi(r) = r^{-exponent_}
  std::vector<std::pair<double, double>> knots_; // table, sorted by r
  std::vector<double> log_r_, log_v_;            // precomputed logs of the knots
};

double eval_phi(const PhiSpec& spec, double r);

/// G_p membership audit. For powers the verdict is analytic
/// (member iff 0 <= a <= d/p, both constants 1); for tables the constants
/// are empirical maxima over the audit grid.
struct GpReport {
  Rational p;
  int d = 1;
  double almost_decreasing_constant = 1.0;  // +inf marks failure
  double almost_increasing_constant = 1.0;  // for r^{d/p} phi(r); +inf marks failure
  double doubling_constant = 1.0;
  bool member = false;
  std::string grid;  // description of the sample points used
};

/// 512 log-spaced points over [1e-4, 1e4], the default audit grid.
std::vector<double> default_phi_grid();

GpReport check_G_p(const PhiSpec& spec, const Rational& p, int d,
                   std::span<const double> grid);

/// Almost-decreasing audit of r^{eps/p} phi(r) (the extra hypothesis of the
/// equal-product criteria).
struct EpsDecreasingReport {
  double eps = 0.0;
  double constant = 1.0;  // +inf marks failure
  bool holds = false;
  std::string grid;
};

EpsDecreasingReport check_eps_almost_decreasing(const PhiSpec& spec, const Rational& p,
                                                double eps, std::span<const double> grid);

/// Pointwise product. Powers add exponents exactly; any table in the input
/// produces a table on the union of the knots.
PhiSpec product_phi(std::span<const PhiSpec> specs);

/// JSON: {"type":"power","a":"1/2"} or {"type":"table","knots":[[r,v],...]}.
PhiSpec phi_from_json(const std::string& text);
std::string phi_to_json(const PhiSpec& spec);

std::string gp_report_to_json(const GpReport& report);
std::string eps_report_to_json(const EpsDecreasingReport& report);

}  // namespace mhl
