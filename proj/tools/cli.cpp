#include "cli.hpp"

#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mhl/exponents.hpp"
#include "mhl/falsify.hpp"
#include "mhl/norms.hpp"
#include "mhl/phi.hpp"
#include "mhl/radial.hpp"
#include "mhl/verify.hpp"

namespace mhl::cli {

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  return out;
}

std::vector<Rational> parse_rational_list(const std::string& text) {
  std::vector<Rational> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(Rational::parse(item));
  }
  return out;
}

std::vector<double> log_spaced(double lo, double hi, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i)
    out[i] = lo * std::exp(std::log(hi / lo) * i / (n - 1));
  return out;
}

struct NormArgs {
  std::string function_path;
  std::string p_text;
  std::string q_text;
  std::string phi_path;
  bool weak = false;
  bool oracle = false;
  int grid = 4096;
  std::uint64_t seed = 0x9e3779b97f4a7c15ull;
};

struct ExponentArgs {
  std::string p_text, q_text, factors_text;
  int d = 1;
};

struct VerifyArgs {
  std::vector<std::string> function_paths;
  std::string mode = "strong";
  ExponentArgs exponents;
  std::string phi_path;
  std::string factor_ps_text;
  std::vector<std::string> factor_phi_paths;
};

struct FalsifyArgs {
  std::string mode = "q";
  ExponentArgs exponents;
  int K_max = 10000;
  std::string radii_text;
  double eps = 0.0;
  std::string csv_path;
  std::string phi_path;
  std::string factor_ps_text;
  std::vector<std::string> factor_phi_paths;
  bool weak = false;
};

struct PhiCheckArgs {
  std::string phi_path;
  std::string p_text;
  int d = 1;
  double eps = 0.0;
};

struct ChiNormArgs {
  double R = 1.0;
  int d = 1;
  std::string p_text, q_text, phi_path;
};

struct AuditArgs {
  std::string function_path;
  std::string p_text, q_text;
  int samples = 1000;
  std::uint64_t seed = 0x9e3779b97f4a7c15ull;
  int mc_points = 100000;
};

struct EvalArgs {
  std::string function_path;
  std::vector<std::string> function_paths;
  std::string phi_path;
  std::string p_text = "1";
  double r = 1.0;
  double gamma = 0.0;
  double a = 0.0;
  double eps = 0.5;
  int K = 1;
  int d = 1;
  ExponentArgs exponents;
};

ExponentSystem build_system(const ExponentArgs& args) {
  return ExponentSystem(
      ExponentPair(Rational::parse(args.p_text), Rational::parse(args.q_text)),
      parse_factor_list(args.factors_text), args.d);
}

int cmd_norm(const NormArgs& args, std::ostream& out) {
  const RadialStepFunction f = function_from_json(slurp(args.function_path));
  const Rational p = Rational::parse(args.p_text);
  OracleConfig cfg;
  cfg.radius_grid_size = args.grid;
  cfg.seed = args.seed;

  NormResult result;
  if (!args.phi_path.empty()) {
    const PhiSpec phi = phi_from_json(slurp(args.phi_path));
    result = args.oracle ? oracle_norm(f, p, phi, args.weak, cfg)
             : args.weak ? generalized_weak_morrey_norm(f, p, phi, cfg)
                         : generalized_morrey_norm(f, p, phi, cfg);
  } else {
    if (args.q_text.empty())
      throw std::invalid_argument("norm: needs --q or --phi");
    const Rational q = Rational::parse(args.q_text);
    result = args.oracle ? oracle_norm(f, p, q, args.weak, cfg)
             : args.weak ? weak_morrey_norm(f, p, q)
                         : morrey_norm(f, p, q);
  }
  out << norm_result_to_json(result) << "\n";
  return 0;
}

int cmd_check_exponents(const ExponentArgs& args, std::ostream& out) {
  const ConditionReport report = check_holder_exponents(build_system(args));
  out << condition_report_to_json(report) << "\n";
  return report.both_hold() ? 0 : 1;
}

int cmd_verify(const VerifyArgs& args, std::ostream& out) {
  std::vector<RadialStepFunction> functions;
  for (const auto& path : args.function_paths)
    functions.push_back(function_from_json(slurp(path)));
  if (functions.empty()) throw std::invalid_argument("verify-holder: needs --functions");

  VerificationRecord record;
  if (args.mode == "embedding" || args.mode == "gen-embedding") {
    if (functions.size() != 1)
      throw std::invalid_argument("verify-holder: embedding modes take one function");
    const Rational p = Rational::parse(args.exponents.p_text);
    if (args.mode == "embedding") {
      record = verify_embedding(functions.front(), p, Rational::parse(args.exponents.q_text));
    } else {
      if (args.phi_path.empty())
        throw std::invalid_argument("verify-holder: gen-embedding needs --phi");
      record = verify_embedding(functions.front(), p, phi_from_json(slurp(args.phi_path)));
    }
  } else if (args.mode == "strong" || args.mode == "weak") {
    record = verify_holder(functions, build_system(args.exponents), args.mode == "weak");
  } else if (args.mode == "gen-strong" || args.mode == "gen-weak") {
    if (args.phi_path.empty())
      throw std::invalid_argument("verify-holder: generalized modes need --phi");
    const PhiSpec phi = phi_from_json(slurp(args.phi_path));
    std::vector<PhiSpec> factor_phis;
    for (const auto& path : args.factor_phi_paths)
      factor_phis.push_back(phi_from_json(slurp(path)));
    const std::vector<Rational> factor_ps = parse_rational_list(args.factor_ps_text);
    record = verify_holder_generalized(functions, Rational::parse(args.exponents.p_text),
                                       factor_ps, phi, factor_phis,
                                       args.mode == "gen-weak");
  } else {
    throw std::invalid_argument("verify-holder: unknown mode '" + args.mode + "'");
  }
  out << "result: " << (record.holds ? "PASS" : "FAIL") << " (" << record.mode
      << ", lhs=" << record.lhs << ", " << record.multiplier << "*rhs="
      << record.multiplier * record.rhs << ")\n";
  out << verification_record_to_json(record) << "\n";
  return record.holds ? 0 : 1;
}

int cmd_falsify(const FalsifyArgs& args, std::ostream& out) {
  DivergenceReport report;
  if (args.mode == "q" || args.mode == "p" || args.mode == "weak-p") {
    const ExponentSystem system = build_system(args.exponents);
    if (args.mode == "q") {
      const std::vector<double> radii = args.radii_text.empty()
                                            ? log_spaced(5e-3, 5.0, 9)
                                            : parse_double_list(args.radii_text);
      report = q_scaling_series(system, radii);
    } else {
      if (args.K_max > 100000)
        throw std::invalid_argument("falsify: Kmax is capped at 100000 shells");
      const std::vector<int> Ks = default_K_series(args.K_max);
      const std::optional<double> eps =
          args.eps > 0.0 ? std::optional<double>(args.eps) : std::nullopt;
      report = args.mode == "p" ? p_divergence_series(system, Ks, eps)
                                : weak_p_divergence_series(system, Ks, eps);
    }
  } else if (args.mode == "phi") {
    if (args.phi_path.empty()) throw std::invalid_argument("falsify phi: needs --phi");
    const PhiSpec phi = phi_from_json(slurp(args.phi_path));
    std::vector<PhiSpec> factor_phis;
    for (const auto& path : args.factor_phi_paths)
      factor_phis.push_back(phi_from_json(slurp(path)));
    const std::vector<Rational> factor_ps = parse_rational_list(args.factor_ps_text);
    const std::vector<double> radii = args.radii_text.empty()
                                          ? log_spaced(1.0, 400.0, 9)
                                          : parse_double_list(args.radii_text);
    report = phi_necessity_series(Rational::parse(args.exponents.p_text), factor_ps, phi,
                                  factor_phis, radii, args.weak);
  } else {
    throw std::invalid_argument("falsify: unknown mode '" + args.mode + "'");
  }

  if (!args.csv_path.empty()) {
    std::ofstream csv(args.csv_path);
    if (!csv) throw std::invalid_argument("cannot write CSV file: " + args.csv_path);
    csv << divergence_report_to_csv(report);
  }
  out << divergence_report_to_json(report) << "\n";
  return report.verdict == Verdict::diverges ? 1 : 0;
}

int cmd_phi_check(const PhiCheckArgs& args, std::ostream& out) {
  const PhiSpec phi = phi_from_json(slurp(args.phi_path));
  const Rational p = Rational::parse(args.p_text);
  const auto grid = default_phi_grid();
  const GpReport report = check_G_p(phi, p, args.d, grid);
  nlohmann::json j = nlohmann::json::parse(gp_report_to_json(report));
  bool ok = report.member;
  if (args.eps > 0.0) {
    const EpsDecreasingReport eps_report =
        check_eps_almost_decreasing(phi, p, args.eps, grid);
    j["eps_almost_decreasing"] = nlohmann::json::parse(eps_report_to_json(eps_report));
    ok = ok && eps_report.holds;
  }
  out << j.dump() << "\n";
  return ok ? 0 : 1;
}

int cmd_chi_norm(const ChiNormArgs& args, std::ostream& out) {
  const RadialStepFunction chi = indicator_ball(args.R, args.d);
  const Rational p = Rational::parse(args.p_text);
  nlohmann::json j;
  if (!args.phi_path.empty()) {
    const PhiSpec phi = phi_from_json(slurp(args.phi_path));
    j["strong"] = nlohmann::json::parse(norm_result_to_json(generalized_morrey_norm(chi, p, phi)));
    j["weak"] = nlohmann::json::parse(norm_result_to_json(generalized_weak_morrey_norm(chi, p, phi)));
    j["bracket_lower"] = 1.0 / phi(args.R);  // 1/phi(R) <= norm
  } else {
    if (args.q_text.empty()) throw std::invalid_argument("chi-norm: needs --q or --phi");
    const Rational q = Rational::parse(args.q_text);
    j["strong"] = nlohmann::json::parse(norm_result_to_json(morrey_norm(chi, p, q)));
    j["weak"] = nlohmann::json::parse(norm_result_to_json(weak_morrey_norm(chi, p, q)));
    j["closed_form"] = std::pow(ball_volume(args.d, args.R), q.reciprocal().to_double());
  }
  out << j.dump() << "\n";
  return 0;
}

int cmd_audit(const AuditArgs& args, std::ostream& out) {
  const RadialStepFunction f = function_from_json(slurp(args.function_path));
  OracleConfig cfg;
  cfg.seed = args.seed;
  cfg.samples = args.mc_points;
  const AuditReport report =
      audit_centered_supremum(f, Rational::parse(args.p_text),
                              Rational::parse(args.q_text), args.samples, cfg);
  out << audit_report_to_json(report) << "\n";
  const double allowance =
      std::max(1e-12 * std::max(1.0, report.centered_value), 3.0 * report.max_offcenter_stderr);
  return report.margin >= -allowance ? 0 : 1;
}

nlohmann::json scalar_payload(double value) { return nlohmann::json{{"value", value}}; }

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Morrey-type norms of radial step functions and Hoelder inequality checks"};
  app.require_subcommand(1);

  NormArgs norm_args;
  auto* norm = app.add_subcommand("norm", "Compute a (weak/generalized) Morrey norm");
  norm->add_option("--function", norm_args.function_path, "function JSON file")->required();
  norm->add_option("--p", norm_args.p_text, "exponent p")->required();
  norm->add_option("--q", norm_args.q_text, "exponent q");
  norm->add_option("--phi", norm_args.phi_path, "phi JSON file (generalized norms)");
  norm->add_flag("--weak", norm_args.weak, "weak norm");
  norm->add_flag("--oracle", norm_args.oracle, "brute-force grid oracle");
  norm->add_option("--grid", norm_args.grid, "oracle grid size");
  norm->add_option("--seed", norm_args.seed, "oracle seed");

  ExponentArgs exp_args;
  auto* checkexp = app.add_subcommand("check-exponents", "Check the Hoelder exponent conditions");
  checkexp->add_option("--p", exp_args.p_text)->required();
  checkexp->add_option("--q", exp_args.q_text)->required();
  checkexp->add_option("--factors", exp_args.factors_text, "p1/q1,p2/q2,...")->required();
  checkexp->add_option("--d", exp_args.d, "dimension");

  VerifyArgs verify_args;
  auto* verify = app.add_subcommand("verify-holder", "Verify a Hoelder inequality instance");
  verify->add_option("--functions", verify_args.function_paths, "function JSON files")
      ->required()
      ->expected(-1);
  verify->add_option("--mode", verify_args.mode,
                     "strong|weak|gen-strong|gen-weak|embedding|gen-embedding");
  verify->add_option("--p", verify_args.exponents.p_text)->required();
  verify->add_option("--q", verify_args.exponents.q_text);
  verify->add_option("--factors", verify_args.exponents.factors_text, "p1/q1,p2/q2,...");
  verify->add_option("--d", verify_args.exponents.d, "dimension");
  verify->add_option("--phi", verify_args.phi_path, "target phi JSON file");
  verify->add_option("--factor-ps", verify_args.factor_ps_text, "p1,p2,...");
  verify->add_option("--factor-phis", verify_args.factor_phi_paths, "phi JSON files")
      ->expected(-1);

  FalsifyArgs falsify_args;
  auto* falsify = app.add_subcommand("falsify", "Run a necessity (divergence) series");
  falsify->add_option("--mode", falsify_args.mode, "q|p|weak-p|phi")->required();
  falsify->add_option("--p", falsify_args.exponents.p_text)->required();
  falsify->add_option("--q", falsify_args.exponents.q_text);
  falsify->add_option("--factors", falsify_args.exponents.factors_text, "p1/q1,p2/q2,...");
  falsify->add_option("--d", falsify_args.exponents.d, "dimension");
  falsify->add_option("--Kmax", falsify_args.K_max, "largest K in the g_{eps,K} series");
  falsify->add_option("--radii", falsify_args.radii_text, "comma-separated radii");
  falsify->add_option("--eps", falsify_args.eps, "epsilon (default: half the admissible bound)");
  falsify->add_option("--csv", falsify_args.csv_path, "write rows as CSV to this path");
  falsify->add_option("--phi", falsify_args.phi_path, "target phi JSON file (phi mode)");
  falsify->add_option("--factor-ps", falsify_args.factor_ps_text, "p1,p2,... (phi mode)");
  falsify->add_option("--factor-phis", falsify_args.factor_phi_paths, "phi JSON files")
      ->expected(-1);
  falsify->add_flag("--weak", falsify_args.weak, "weak-norm variant (phi mode)");

  PhiCheckArgs phi_args;
  auto* phicheck = app.add_subcommand("phi-check", "Audit G_p membership of a phi spec");
  phicheck->add_option("--phi", phi_args.phi_path)->required();
  phicheck->add_option("--p", phi_args.p_text)->required();
  phicheck->add_option("--d", phi_args.d, "dimension")->required();
  phicheck->add_option("--eps", phi_args.eps, "also audit r^{eps/p} phi(r) almost decreasing");

  ChiNormArgs chi_args;
  auto* chinorm = app.add_subcommand("chi-norm", "Norms of a ball indicator, with closed form");
  chinorm->add_option("--R", chi_args.R, "ball radius")->required();
  chinorm->add_option("--d", chi_args.d, "dimension")->required();
  chinorm->add_option("--p", chi_args.p_text)->required();
  chinorm->add_option("--q", chi_args.q_text);
  chinorm->add_option("--phi", chi_args.phi_path, "phi JSON file");

  AuditArgs audit_args;
  auto* audit = app.add_subcommand("audit-centered", "Off-center audit of the centered supremum");
  audit->add_option("--function", audit_args.function_path)->required();
  audit->add_option("--p", audit_args.p_text)->required();
  audit->add_option("--q", audit_args.q_text)->required();
  audit->add_option("--samples", audit_args.samples, "number of sampled balls");
  audit->add_option("--seed", audit_args.seed, "RNG seed");
  audit->add_option("--mc-points", audit_args.mc_points, "Monte-Carlo points per ball (d=2)");

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "Evaluate the underlying geometry directly");
  eval->require_subcommand(1);
  auto* ev_integral = eval->add_subcommand("ball-integral", "int_{B(0,r)} |f|^p");
  ev_integral->add_option("--function", eval_args.function_path)->required();
  ev_integral->add_option("--p", eval_args.p_text);
  ev_integral->add_option("--r", eval_args.r)->required();
  auto* ev_super = eval->add_subcommand("superlevel", "|{f > gamma} cap B(0,r)|");
  ev_super->add_option("--function", eval_args.function_path)->required();
  ev_super->add_option("--gamma", eval_args.gamma)->required();
  ev_super->add_option("--r", eval_args.r)->required();
  auto* ev_offcenter = eval->add_subcommand("offcenter", "int over (a-r, a+r) of |f|^p, d=1");
  ev_offcenter->add_option("--function", eval_args.function_path)->required();
  ev_offcenter->add_option("--a", eval_args.a)->required();
  ev_offcenter->add_option("--r", eval_args.r)->required();
  ev_offcenter->add_option("--p", eval_args.p_text);
  auto* ev_product = eval->add_subcommand("product", "pointwise product, canonical JSON out");
  ev_product->add_option("--functions", eval_args.function_paths)->required()->expected(-1);
  auto* ev_phi = eval->add_subcommand("phi", "phi(r)");
  ev_phi->add_option("--phi", eval_args.phi_path)->required();
  ev_phi->add_option("--r", eval_args.r)->required();
  auto* ev_volume = eval->add_subcommand("ball-volume", "|B(0,R)| in R^d");
  ev_volume->add_option("--d", eval_args.d)->required();
  ev_volume->add_option("--R", eval_args.r, "radius (default 1)");
  auto* ev_make_g = eval->add_subcommand("make-g", "the extremal family g_{eps,K}");
  ev_make_g->add_option("--eps", eval_args.eps)->required();
  ev_make_g->add_option("--K", eval_args.K)->required();
  ev_make_g->add_option("--d", eval_args.d);
  auto* ev_choose_eps = eval->add_subcommand("choose-eps", "default eps for an exponent system");
  ev_choose_eps->add_option("--p", eval_args.exponents.p_text)->required();
  ev_choose_eps->add_option("--q", eval_args.exponents.q_text)->required();
  ev_choose_eps->add_option("--factors", eval_args.exponents.factors_text)->required();
  ev_choose_eps->add_option("--d", eval_args.exponents.d);

  std::vector<const char*> argv;
  argv.push_back("mhl");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (norm->parsed()) return cmd_norm(norm_args, out);
    if (checkexp->parsed()) return cmd_check_exponents(exp_args, out);
    if (verify->parsed()) return cmd_verify(verify_args, out);
    if (falsify->parsed()) return cmd_falsify(falsify_args, out);
    if (phicheck->parsed()) return cmd_phi_check(phi_args, out);
    if (chinorm->parsed()) return cmd_chi_norm(chi_args, out);
    if (audit->parsed()) return cmd_audit(audit_args, out);
    if (eval->parsed()) {
      if (ev_integral->parsed()) {
        const auto f = function_from_json(slurp(eval_args.function_path));
        out << scalar_payload(ball_integral_power(f, Rational::parse(eval_args.p_text),
                                                  eval_args.r))
            << "\n";
      } else if (ev_super->parsed()) {
        const auto f = function_from_json(slurp(eval_args.function_path));
        out << scalar_payload(superlevel_measure(f, eval_args.gamma, eval_args.r)) << "\n";
      } else if (ev_offcenter->parsed()) {
        const auto f = function_from_json(slurp(eval_args.function_path));
        out << scalar_payload(offcenter_integral_1d(f, eval_args.a, eval_args.r,
                                                    Rational::parse(eval_args.p_text)))
            << "\n";
      } else if (ev_product->parsed()) {
        auto prod = function_from_json(slurp(eval_args.function_paths.at(0)));
        for (std::size_t i = 1; i < eval_args.function_paths.size(); ++i)
          prod = pointwise_product(prod, function_from_json(slurp(eval_args.function_paths[i])));
        out << function_to_json(prod) << "\n";
      } else if (ev_phi->parsed()) {
        out << scalar_payload(phi_from_json(slurp(eval_args.phi_path))(eval_args.r)) << "\n";
      } else if (ev_volume->parsed()) {
        out << scalar_payload(ball_volume(eval_args.d, eval_args.r)) << "\n";
      } else if (ev_make_g->parsed()) {
        out << function_to_json(make_g_eps_K(eval_args.eps, eval_args.K, eval_args.d)) << "\n";
      } else if (ev_choose_eps->parsed()) {
        out << scalar_payload(choose_epsilon(build_system(eval_args.exponents))) << "\n";
      }
      return 0;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  err << "error: no subcommand\n";
  return 2;
}

}  // namespace mhl::cli
