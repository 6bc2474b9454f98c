#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mhl/rational.hpp"

namespace mhl {

/// One annular shell {x : inner <= |x| < outer} carrying a constant
/// nonnegative value. The endpoint-closedness flags are kept so functions can
/// be written down exactly as constructed; Lebesgue measure does not see
/// them and no computation reads them.
struct Shell {
  double inner = 0.0;
  double outer = 0.0;
  double value = 0.0;
  bool inner_closed = true;
  bool outer_closed = false;
};

/// An open or closed ball B(center, radius) in R^d.
struct Ball {
  std::vector<double> center;
  double radius = 1.0;
};

/// A radially symmetric step function with bounded support: finitely many
/// disjoint shells, canonicalized so that zero-value shells are dropped,
/// shells are sorted by inner radius, and shells that touch (within 1e-12
/// relative) with equal values are merged into one.
class RadialStepFunction {
 public:
  RadialStepFunction(int dimension, std::vector<Shell> shells);

  static RadialStepFunction zero(int dimension) {
    return RadialStepFunction(dimension, {});
  }

  int dimension() const { return dimension_; }
  const std::vector<Shell>& shells() const { return shells_; }
  bool is_zero() const { return shells_.empty(); }

  /// Largest outer radius (0 for the zero function).
  double max_radius() const;
  /// Smallest positive shell boundary (0 for the zero function).
  double min_positive_breakpoint() const;
  double max_value() const;

  /// Pointwise value at |x| = radius (endpoint convention inner <= s < outer;
  /// irrelevant to every measure-based computation).
  double value_at(double radius) const;

  /// Distinct positive values, descending. These are the only thresholds the
  /// weak-norm supremum over gamma can attain.
  std::vector<double> distinct_values_descending() const;

  /// The 0/1 function of {f >= level}.
  RadialStepFunction superlevel_indicator(double level) const;

  RadialStepFunction scaled(double c) const;
  /// x -> f(lambda x), i.e. every shell radius divided by lambda.
  RadialStepFunction dilated(double lambda) const;

  /// Short stable hash of the canonical form, for record provenance.
  std::string digest() const;

 private:
  int dimension_ = 1;
  std::vector<Shell> shells_;
};

/// Volume of the d-dimensional unit ball, v_d = pi^{d/2} / Gamma(d/2 + 1).
double unit_ball_volume(int d);
double ball_volume(int d, double radius);

/// Integral of |f|^p over the centered ball B(0, r), exact (a finite sum of
/// shell volumes capped at radius r).
double ball_integral_power(const RadialStepFunction& f, const Rational& p, double r);

/// Lebesgue measure of {x in B(0,r) : f(x) > gamma}; strict inequality.
double superlevel_measure(const RadialStepFunction& f, double gamma, double r);

RadialStepFunction pointwise_product(const RadialStepFunction& f,
                                     const RadialStepFunction& g);

/// chi_{B(0,R)} in dimension d.
RadialStepFunction indicator_ball(double R, int d);

/// Exact integral of |f|^p over the off-center interval (a - r, a + r);
/// dimension 1 only, used by the centered-supremum audit.
double offcenter_integral_1d(const RadialStepFunction& f, double a, double r,
                             const Rational& p);

/// Seeded Monte-Carlo estimate of int_{B((a,0), r)} |f|^p in dimension 2,
/// with its standard error. No exact off-center integration exists in
/// d >= 2; this estimator backs the centered-supremum audit there.
struct McIntegral {
  double value = 0.0;
  double stderr_ = 0.0;
};
McIntegral offcenter_integral_mc_2d(const RadialStepFunction& f, double a, double r,
                                    const Rational& p, int samples, std::uint64_t seed);

/// JSON: {"dim": d, "shells": [{"inner": r0, "outer": r1, "value": v}, ...]}.
/// Rejects input that does not canonicalize, with a diagnostic naming the
/// offending field.
RadialStepFunction function_from_json(const std::string& text);
std::string function_to_json(const RadialStepFunction& f);

}  // namespace mhl
