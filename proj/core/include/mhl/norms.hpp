#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "mhl/phi.hpp"
#include "mhl/radial.hpp"
#include "mhl/rational.hpp"

namespace mhl {

/// A computed norm value together with where the supremum was attained and
/// how it was computed. tolerance is 0 for the exact candidate paths.
struct NormResult {
  double value = 0.0;
  double argmax_radius = 1.0;
  std::optional<double> argmax_gamma;  // weak norms only: the attaining level
  std::string method = "exact-candidates";  // exact-candidates | grid-oracle | grid-refined
  double tolerance = 0.0;
};

/// Settings for the grid paths (oracle, table-phi search, Monte-Carlo audit).
struct OracleConfig {
  int radius_grid_size = 4096;     // >= 64
  double radius_pad = 10.0;        // grid spans [R_min/pad, pad*R_max]
  std::uint64_t seed = 0x9e3779b97f4a7c15ull;
  int samples = 100000;            // Monte-Carlo points per sampled ball (d = 2)

  void validate() const;
};

/// All suprema over balls are taken over balls centered at the origin; that
/// reduction is the documented contract of the radial step-function class
/// and is checked against off-center balls by audit_centered_supremum.

/// ||f||_{M^p_q} = sup_r |B(0,r)|^{1/q-1/p} (int_{B(0,r)} |f|^p)^{1/p},
/// exact: the supremum is reduced to a finite candidate set (shell
/// boundaries plus per-segment interior critical points in t = r^d).
NormResult morrey_norm(const RadialStepFunction& f, const Rational& p, const Rational& q);

/// ||f||_{wM^p_q}: the supremum over gamma is exact over the distinct value
/// levels of f approached from below, each level handled by the same
/// candidate algorithm on the superlevel indicator.
NormResult weak_morrey_norm(const RadialStepFunction& f, const Rational& p, const Rational& q);

/// ||f||_{M^p_phi} = sup_r (1/phi(r)) ((1/|B(0,r)|) int |f|^p)^{1/p}. Power
/// weights run the exact candidate path (phi must lie in G_p, i.e.
/// 0 <= a <= d/p, else the norm is infinite on this class and the call is
/// rejected); table weights use the radius grid plus golden-section
/// refinement (method "grid-refined").
NormResult generalized_morrey_norm(const RadialStepFunction& f, const Rational& p,
                                   const PhiSpec& phi, const OracleConfig& cfg = {});

NormResult generalized_weak_morrey_norm(const RadialStepFunction& f, const Rational& p,
                                        const PhiSpec& phi, const OracleConfig& cfg = {});

/// Brute-force grid oracle: evaluates the defining expression on the radius
/// grid only (gamma at the value levels scaled by 1 - 1e-9), with no
/// knowledge of the candidate analysis. tolerance reports the rigorous
/// one-sided resolution bound value * (e^{s h} - 1), where h is the log grid
/// spacing and s the worst descent slope of the objective right of its
/// argmax.
NormResult oracle_norm(const RadialStepFunction& f, const Rational& p, const Rational& q,
                       bool weak, const OracleConfig& cfg);
NormResult oracle_norm(const RadialStepFunction& f, const Rational& p, const PhiSpec& phi,
                       bool weak, const OracleConfig& cfg);

/// Off-center audit of the centered reduction: samples balls B(a, r) and
/// compares the off-center objective against the centered supremum.
/// d = 1 evaluates integrals exactly; d = 2 uses seeded Monte-Carlo and
/// reports the standard error at the worst sample.
struct AuditReport {
  double centered_value = 0.0;
  double max_offcenter_value = 0.0;
  double margin = 0.0;  // centered_value - max_offcenter_value
  long samples_used = 0;
  double max_offcenter_stderr = 0.0;  // 0 for the exact d = 1 path
  double worst_center = 0.0;
  double worst_radius = 0.0;
};

AuditReport audit_centered_supremum(const RadialStepFunction& f, const Rational& p,
                                    const Rational& q, int num_balls,
                                    const OracleConfig& cfg);

std::string norm_result_to_json(const NormResult& result);
std::string audit_report_to_json(const AuditReport& report);

}  // namespace mhl
