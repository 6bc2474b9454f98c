#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mhl/exponents.hpp"
#include "mhl/norms.hpp"
#include "mhl/phi.hpp"
#include "mhl/radial.hpp"

namespace mhl {

/// Parameters of the extremal family g_{eps,K}: the unit ball plus K
/// thinning annuli [j, j + j^{-eps}]. eps must satisfy
/// 0 < eps < min_i d*p_i/q_i for the exponent system in use.
struct CounterexampleParams {
  double epsilon = 0.5;
  int K = 1;
  int dimension = 1;
};

/// g_{eps,K} = chi_{0<=|x|<1} + sum_{j=1}^K chi_{j<=|x|<=j+j^{-eps}},
/// canonicalized (touching annuli merge).
RadialStepFunction make_g_eps_K(double eps, int K, int d);
RadialStepFunction make_g_eps_K(const CounterexampleParams& params);

/// Midpoint of the admissible range: min_i { d*p_i/q_i } / 2.
double choose_epsilon(const ExponentSystem& system);

struct DivergenceRow {
  double param = 0.0;  // K or R
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;  // lhs / rhs
  std::optional<double> analytic_ratio;  // phi mode: prod phi_i(R) / phi(R)
};

enum class Verdict { diverges, bounded, inconclusive };
std::string verdict_name(Verdict v);

/// A series of Hoelder ratios against a growing parameter, with a log-log
/// least-squares slope fitted over the tail half of the rows. Radius series
/// (q, phi) sweep the full scale range, so a diverging verdict needs ratio
/// spread max/min >= 10 together with a nonzero fitted slope (either sign:
/// they diverge at R -> 0 or R -> infinity depending on the exponent
/// defect). K-series ratios grow like K^s with s a fraction of epsilon, far
/// too slowly to spread by 10 at desk scale, so there the verdict is a
/// positive fitted slope above the flatness floor.
struct DivergenceReport {
  std::string mode;  // q | p | weak-p | phi | weak-phi
  std::vector<DivergenceRow> rows;
  double fitted_slope = 0.0;
  double predicted_slope = 0.0;
  double ratio_spread = 1.0;  // max ratio / min ratio
  Verdict verdict = Verdict::inconclusive;
};

/// chi_{B(0,R)} ratios across radii; exposes the q-condition:
/// ratio = |B(0,R)|^{1/q - sum 1/q_i} exactly,
/// predicted slope d(1/q - sum 1/q_i).
DivergenceReport q_scaling_series(const ExponentSystem& system,
                                  const std::vector<double>& radii);

/// g_{eps,K} ratios across K (strong norms); requires the q-condition to
/// hold exactly, predicted slope eps*(sum 1/p_i - 1/p).
DivergenceReport p_divergence_series(const ExponentSystem& system,
                                     const std::vector<int>& K_values,
                                     std::optional<double> eps = std::nullopt);

/// Weak-norm variant: weak norms on both sides, rhs multiplied by m.
DivergenceReport weak_p_divergence_series(const ExponentSystem& system,
                                          const std::vector<int>& K_values,
                                          std::optional<double> eps = std::nullopt);

/// chi_{B(0,R)} ratios of generalized norms across radii, with the analytic
/// ratio prod phi_i(R)/phi(R) alongside; verdict follows the analytic
/// spread. weak = true uses weak norms and multiplier m.
DivergenceReport phi_necessity_series(const Rational& p,
                                      const std::vector<Rational>& factor_ps,
                                      const PhiSpec& phi,
                                      const std::vector<PhiSpec>& factor_phis,
                                      const std::vector<double>& radii,
                                      bool weak = false,
                                      const OracleConfig& cfg = {});

/// CSV with header `param,lhs,rhs,ratio`.
std::string divergence_report_to_csv(const DivergenceReport& report);
std::string divergence_report_to_json(const DivergenceReport& report);

/// Log-spaced K series {lo, ..., K_max} used by the CLI (5 points per decade
/// span, rounded, deduplicated).
std::vector<int> default_K_series(int K_max);

}  // namespace mhl
