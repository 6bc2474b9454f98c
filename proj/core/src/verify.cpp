#include "mhl/verify.hpp"

#include <stdexcept>

#include <json.hpp>

namespace mhl {

namespace {

constexpr double kRelGuard = 1e-12;

/// lhs <= multiplier*rhs with a relative float guard; exact zero cases pass
/// with a zero guard.
void settle(VerificationRecord& record) {
  record.slack = record.multiplier * record.rhs - record.lhs;
  record.holds = record.lhs <= record.multiplier * record.rhs + kRelGuard * record.rhs;
}

std::string exponent_label(const ExponentSystem& system) {
  std::string s = "target (" + system.target.p.str() + "," + system.target.q.str() +
                  "), factors [";
  for (std::size_t i = 0; i < system.factors.size(); ++i) {
    if (i) s += ",";
    s += "(" + system.factors[i].p.str() + "," + system.factors[i].q.str() + ")";
  }
  s += "], d=" + std::to_string(system.dimension);
  return s;
}

void check_tuple(std::span<const RadialStepFunction> functions, std::size_t expected,
                 int dimension) {
  if (functions.empty()) throw std::invalid_argument("verify: empty function tuple");
  if (functions.size() != expected)
    throw std::invalid_argument("verify: got " + std::to_string(functions.size()) +
                                " functions for " + std::to_string(expected) + " factors");
  for (const auto& f : functions) {
    if (f.dimension() != dimension)
      throw std::invalid_argument("verify: function dimension " +
                                  std::to_string(f.dimension()) +
                                  " does not match system dimension " +
                                  std::to_string(dimension));
  }
}

RadialStepFunction product_of(std::span<const RadialStepFunction> functions) {
  RadialStepFunction prod = functions.front();
  for (std::size_t i = 1; i < functions.size(); ++i)
    prod = pointwise_product(prod, functions[i]);
  return prod;
}

}  // namespace

VerificationRecord verify_holder(std::span<const RadialStepFunction> functions,
                                 const ExponentSystem& system, bool weak) {
  system.validate();
  check_tuple(functions, system.factors.size(), system.dimension);

  VerificationRecord record;
  record.mode = weak ? "weak" : "strong";
  record.multiplier = weak ? static_cast<double>(system.factors.size()) : 1.0;
  record.exponents = exponent_label(system);

  const RadialStepFunction prod = product_of(functions);
  const auto lhs_norm = weak ? weak_morrey_norm(prod, system.target.p, system.target.q)
                             : morrey_norm(prod, system.target.p, system.target.q);
  record.lhs = lhs_norm.value;

  record.rhs = 1.0;
  for (std::size_t i = 0; i < functions.size(); ++i) {
    const auto& pair = system.factors[i];
    const auto factor_norm = weak ? weak_morrey_norm(functions[i], pair.p, pair.q)
                                  : morrey_norm(functions[i], pair.p, pair.q);
    record.rhs *= factor_norm.value;
    record.function_digests.push_back(functions[i].digest());
  }
  settle(record);
  return record;
}

VerificationRecord verify_holder_generalized(std::span<const RadialStepFunction> functions,
                                             const Rational& p,
                                             std::span<const Rational> factor_ps,
                                             const PhiSpec& phi,
                                             std::span<const PhiSpec> factor_phis,
                                             bool weak, const OracleConfig& cfg) {
  if (factor_ps.size() != factor_phis.size())
    throw std::invalid_argument("verify: factor p count != factor phi count");
  if (factor_ps.size() < 2) throw std::invalid_argument("verify: needs m >= 2 factors");
  if (functions.empty()) throw std::invalid_argument("verify: empty function tuple");
  check_tuple(functions, factor_ps.size(), functions.front().dimension());

  VerificationRecord record;
  record.mode = weak ? "gen-weak" : "gen-strong";
  record.multiplier = weak ? static_cast<double>(factor_ps.size()) : 1.0;
  record.exponents = "p=" + p.str();
  record.phi_digests.push_back(phi.digest());

  const RadialStepFunction prod = product_of(functions);
  record.lhs = weak ? generalized_weak_morrey_norm(prod, p, phi, cfg).value
                    : generalized_morrey_norm(prod, p, phi, cfg).value;
  record.rhs = 1.0;
  for (std::size_t i = 0; i < functions.size(); ++i) {
    record.rhs *= weak
        ? generalized_weak_morrey_norm(functions[i], factor_ps[i], factor_phis[i], cfg).value
        : generalized_morrey_norm(functions[i], factor_ps[i], factor_phis[i], cfg).value;
    record.function_digests.push_back(functions[i].digest());
    record.phi_digests.push_back(factor_phis[i].digest());
    record.exponents += ",p" + std::to_string(i + 1) + "=" + factor_ps[i].str();
  }
  settle(record);
  return record;
}

VerificationRecord verify_embedding(const RadialStepFunction& f, const Rational& p,
                                    const Rational& q) {
  VerificationRecord record;
  record.mode = "embedding";
  record.multiplier = 1.0;
  record.exponents = "p=" + p.str() + ",q=" + q.str();
  record.function_digests.push_back(f.digest());
  record.lhs = weak_morrey_norm(f, p, q).value;
  record.rhs = morrey_norm(f, p, q).value;
  settle(record);
  return record;
}

VerificationRecord verify_embedding(const RadialStepFunction& f, const Rational& p,
                                    const PhiSpec& phi, const OracleConfig& cfg) {
  VerificationRecord record;
  record.mode = "gen-embedding";
  record.multiplier = 1.0;
  record.exponents = "p=" + p.str();
  record.function_digests.push_back(f.digest());
  record.phi_digests.push_back(phi.digest());
  record.lhs = generalized_weak_morrey_norm(f, p, phi, cfg).value;
  record.rhs = generalized_morrey_norm(f, p, phi, cfg).value;
  settle(record);
  return record;
}

std::string verification_record_to_json(const VerificationRecord& record) {
  nlohmann::json j;
  j["mode"] = record.mode;
  j["lhs"] = record.lhs;
  j["rhs"] = record.rhs;
  j["multiplier"] = record.multiplier;
  j["holds"] = record.holds;
  j["slack"] = record.slack;
  j["inputs"]["functions"] = record.function_digests;
  j["inputs"]["exponents"] = record.exponents;
  if (!record.phi_digests.empty()) j["inputs"]["phis"] = record.phi_digests;
  return j.dump();
}

}  // namespace mhl
