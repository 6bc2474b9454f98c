#pragma once

#include <span>
#include <string>
#include <vector>

#include "mhl/exponents.hpp"
#include "mhl/norms.hpp"
#include "mhl/phi.hpp"
#include "mhl/radial.hpp"

namespace mhl {

/// One checked inequality instance: lhs <= multiplier * rhs, with a 1e-12
/// relative guard on rhs so exact-equality extremal cases (indicators of
/// balls) do not flap under float rounding.
struct VerificationRecord {
  std::string mode;  // strong | weak | gen-strong | gen-weak | embedding | gen-embedding
  double lhs = 0.0;
  double rhs = 0.0;
  double multiplier = 1.0;
  bool holds = false;
  double slack = 0.0;  // multiplier*rhs - lhs
  std::vector<std::string> function_digests;
  std::string exponents;    // human-readable provenance
  std::vector<std::string> phi_digests;
};

/// ||prod f_i||_{M^p_q} <= prod ||f_i||_{M^{p_i}_{q_i}} (strong) or the weak
/// version with multiplier m. Functions must all share system.dimension and
/// their count must equal the number of factors.
VerificationRecord verify_holder(std::span<const RadialStepFunction> functions,
                                 const ExponentSystem& system, bool weak);

/// Generalized version with weights phi, phi_i in place of the q exponents.
VerificationRecord verify_holder_generalized(std::span<const RadialStepFunction> functions,
                                             const Rational& p,
                                             std::span<const Rational> factor_ps,
                                             const PhiSpec& phi,
                                             std::span<const PhiSpec> factor_phis,
                                             bool weak, const OracleConfig& cfg = {});

/// Weak norm <= strong norm, classical and generalized flavors.
VerificationRecord verify_embedding(const RadialStepFunction& f, const Rational& p,
                                    const Rational& q);
VerificationRecord verify_embedding(const RadialStepFunction& f, const Rational& p,
                                    const PhiSpec& phi, const OracleConfig& cfg = {});

std::string verification_record_to_json(const VerificationRecord& record);

}  // namespace mhl
