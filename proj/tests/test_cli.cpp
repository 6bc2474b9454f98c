#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"

using nlohmann::json;

namespace {

struct Invocation {
  int exit_code;
  std::string out;
  std::string err;
};

Invocation invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = mhl::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path write_temp(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream f(path);
  f << content;
  return path;
}

const std::string kChi1 = R"({"dim": 1, "shells": [{"inner": 0, "outer": 1, "value": 1}]})";
const std::string kPhiHalf = R"({"type": "power", "a": "1/2"})";
const std::string kPhiQuarter = R"({"type": "power", "a": "1/4"})";
const std::string kPhiOne = R"({"type": "power", "a": "1"})";

}  // namespace

TEST_CASE("norm subcommand computes the chi-ball norm") {
  const auto chi = write_temp("mhl_chi1.json", kChi1);
  const auto result = invoke({"norm", "--function", chi.string(), "--p", "1", "--q", "2"});
  CHECK(result.exit_code == 0);
  const json payload = json::parse(result.out);
  CHECK(payload["value"].get<double>() == doctest::Approx(1.414214).epsilon(1e-6));
  CHECK(payload["method"] == "exact-candidates");
  CHECK(payload.contains("tolerance"));

  const auto weak = invoke({"norm", "--function", chi.string(), "--p", "1", "--q", "2", "--weak"});
  CHECK(weak.exit_code == 0);
  CHECK(json::parse(weak.out)["argmax_gamma"].get<double>() == doctest::Approx(1.0));

  const auto oracle =
      invoke({"norm", "--function", chi.string(), "--p", "1", "--q", "2", "--oracle"});
  CHECK(oracle.exit_code == 0);
  CHECK(json::parse(oracle.out)["method"] == "grid-oracle");

  const auto phi = write_temp("mhl_phi_half.json", kPhiHalf);
  const auto gen = invoke({"norm", "--function", chi.string(), "--p", "1", "--phi", phi.string()});
  CHECK(gen.exit_code == 0);
  CHECK(json::parse(gen.out)["value"].get<double>() == doctest::Approx(1.0));
}

TEST_CASE("check-exponents exit codes follow the verdict") {
  const auto fails =
      invoke({"check-exponents", "--p", "1", "--q", "2", "--factors", "2/2,2/2", "--d", "1"});
  CHECK(fails.exit_code == 1);
  const json payload = json::parse(fails.out);
  CHECK(payload["q_condition_holds"] == false);

  const auto holds =
      invoke({"check-exponents", "--p", "1", "--q", "2", "--factors", "2/4,2/4", "--d", "1"});
  CHECK(holds.exit_code == 0);
  CHECK(json::parse(holds.out)["q_condition_holds"] == true);
  CHECK(json::parse(holds.out)["p_star"] == "1");
}

TEST_CASE("verify-holder strong and generalized modes") {
  const auto chi = write_temp("mhl_chi1.json", kChi1);
  const auto strong = invoke({"verify-holder", "--functions", chi.string(), chi.string(),
                              "--mode", "strong", "--p", "1", "--q", "2", "--factors",
                              "2/4,2/4", "--d", "1"});
  CHECK(strong.exit_code == 0);
  CHECK(strong.out.find("result: PASS") != std::string::npos);

  const auto phi = write_temp("mhl_phi_half.json", kPhiHalf);
  const auto phi_q = write_temp("mhl_phi_quarter.json", kPhiQuarter);
  const auto gen = invoke({"verify-holder", "--functions", chi.string(), chi.string(),
                           "--mode", "gen-strong", "--p", "1", "--factor-ps", "2,2",
                           "--phi", phi.string(), "--factor-phis", phi_q.string(),
                           phi_q.string()});
  CHECK(gen.exit_code == 0);

  // Violated phi-product condition at scale: expect FAIL and exit 1.
  const auto big = write_temp("mhl_chi100.json",
                              R"({"dim": 1, "shells": [{"inner": 0, "outer": 100, "value": 1}]})");
  const auto phi1 = write_temp("mhl_phi_one.json", kPhiOne);
  const auto fail = invoke({"verify-holder", "--functions", big.string(), big.string(),
                            "--mode", "gen-strong", "--p", "1", "--factor-ps", "2,2",
                            "--phi", phi1.string(), "--factor-phis", phi_q.string(),
                            phi_q.string()});
  CHECK(fail.exit_code == 1);
  CHECK(fail.out.find("result: FAIL") != std::string::npos);
}

TEST_CASE("falsify p-mode diverges with slope about 0.125 and writes CSV") {
  const auto csv_path = std::filesystem::temp_directory_path() / "mhl_out.csv";
  std::filesystem::remove(csv_path);
  const auto result = invoke({"falsify", "--mode", "p", "--p", "2", "--q", "2", "--factors",
                              "2/4,2/4", "--d", "1", "--Kmax", "10000", "--csv",
                              csv_path.string()});
  CHECK(result.exit_code == 1);  // diverges
  const json payload = json::parse(result.out);
  CHECK(payload["verdict"] == "diverges");
  CHECK(payload["fitted_slope"].get<double>() == doctest::Approx(0.125).epsilon(0.15));
  REQUIRE(std::filesystem::exists(csv_path));
  std::ifstream csv(csv_path);
  std::string header;
  std::getline(csv, header);
  CHECK(header == "param,lhs,rhs,ratio");
}

TEST_CASE("falsify q-mode and bounded outcomes") {
  const auto diverges = invoke({"falsify", "--mode", "q", "--p", "1", "--q", "2",
                                "--factors", "2/2,2/2", "--d", "1"});
  CHECK(diverges.exit_code == 1);
  CHECK(json::parse(diverges.out)["fitted_slope"].get<double>() ==
        doctest::Approx(-0.5).epsilon(1e-6));

  const auto bounded = invoke({"falsify", "--mode", "q", "--p", "1", "--q", "2",
                               "--factors", "2/4,2/4", "--d", "1"});
  CHECK(bounded.exit_code == 0);
  CHECK(json::parse(bounded.out)["verdict"] == "bounded");
}

TEST_CASE("falsify phi-mode") {
  const auto phi1 = write_temp("mhl_phi_one.json", kPhiOne);
  const auto phi_q = write_temp("mhl_phi_quarter.json", kPhiQuarter);
  const auto result = invoke({"falsify", "--mode", "phi", "--p", "1", "--factor-ps", "2,2",
                              "--phi", phi1.string(), "--factor-phis", phi_q.string(),
                              phi_q.string(), "--radii", "1,4,20,100,400"});
  CHECK(result.exit_code == 1);
  const json payload = json::parse(result.out);
  CHECK(payload["verdict"] == "diverges");
  CHECK(payload["rows"].back()["analytic_ratio"].get<double>() == doctest::Approx(20.0));
}

TEST_CASE("phi-check reports membership and eps condition") {
  const auto phi = write_temp("mhl_phi_half.json", kPhiHalf);
  const auto member = invoke({"phi-check", "--phi", phi.string(), "--p", "1", "--d", "1"});
  CHECK(member.exit_code == 0);
  CHECK(json::parse(member.out)["member"] == true);

  const auto with_eps =
      invoke({"phi-check", "--phi", phi.string(), "--p", "2", "--d", "1", "--eps", "2"});
  CHECK(with_eps.exit_code == 1);  // eps/p = 1 > a = 1/2

  const auto phi_bad = write_temp("mhl_phi_bad.json", R"({"type": "power", "a": "3"})");
  CHECK(invoke({"phi-check", "--phi", phi_bad.string(), "--p", "1", "--d", "1"}).exit_code == 1);
}

TEST_CASE("chi-norm prints the closed form") {
  const auto result = invoke({"chi-norm", "--R", "1", "--d", "1", "--p", "1", "--q", "2"});
  CHECK(result.exit_code == 0);
  const json payload = json::parse(result.out);
  CHECK(payload["closed_form"].get<double>() == doctest::Approx(std::sqrt(2.0)));
  CHECK(payload["strong"]["value"].get<double>() == doctest::Approx(std::sqrt(2.0)));
  CHECK(payload["weak"]["value"].get<double>() == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("audit-centered returns the margin verdict") {
  const auto chi = write_temp("mhl_chi1.json", kChi1);
  const auto result = invoke({"audit-centered", "--function", chi.string(), "--p", "1",
                              "--q", "2", "--samples", "200", "--seed", "7"});
  CHECK(result.exit_code == 0);
  const json payload = json::parse(result.out);
  CHECK(payload["margin"].get<double>() >= -1e-12);
}

TEST_CASE("usage and validation errors exit with 2") {
  CHECK(invoke({"norm", "--nope"}).exit_code == 2);
  CHECK(invoke({}).exit_code == 2);
  CHECK(invoke({"mystery"}).exit_code == 2);
  CHECK(invoke({"norm", "--function", "/does/not/exist.json", "--p", "1", "--q", "2"})
            .exit_code == 2);
  const auto bad = write_temp("mhl_bad.json", "{broken");
  const auto result = invoke({"norm", "--function", bad.string(), "--p", "1", "--q", "2"});
  CHECK(result.exit_code == 2);
  CHECK(result.err.find("error:") != std::string::npos);
  // p > q is an invariant violation.
  const auto chi = write_temp("mhl_chi1.json", kChi1);
  CHECK(invoke({"norm", "--function", chi.string(), "--p", "3", "--q", "2"}).exit_code == 2);
}

TEST_CASE("identical invocations produce byte-identical payloads") {
  const auto chi = write_temp("mhl_chi1.json", kChi1);
  const auto a = invoke({"norm", "--function", chi.string(), "--p", "1", "--q", "2",
                         "--oracle", "--seed", "42"});
  const auto b = invoke({"norm", "--function", chi.string(), "--p", "1", "--q", "2",
                         "--oracle", "--seed", "42"});
  CHECK(a.out == b.out);
  CHECK(a.exit_code == b.exit_code);
}

TEST_CASE("eval exposes the geometry primitives") {
  const auto chi = write_temp("mhl_chi1.json", kChi1);
  const auto two = write_temp(
      "mhl_two.json",
      R"({"dim": 1, "shells": [{"inner": 0, "outer": 1, "value": 2}, {"inner": 1, "outer": 2, "value": 1}]})");

  auto r = invoke({"eval", "ball-integral", "--function", two.string(), "--p", "1", "--r", "2"});
  CHECK(r.exit_code == 0);
  CHECK(json::parse(r.out)["value"].get<double>() == doctest::Approx(6.0));

  r = invoke({"eval", "superlevel", "--function", two.string(), "--gamma", "1.5", "--r", "2"});
  CHECK(json::parse(r.out)["value"].get<double>() == doctest::Approx(2.0));

  r = invoke({"eval", "offcenter", "--function", chi.string(), "--a", "0.5", "--r", "1",
              "--p", "1"});
  CHECK(json::parse(r.out)["value"].get<double>() == doctest::Approx(1.5));

  const auto chi2 = write_temp("mhl_chi2.json",
                               R"({"dim": 1, "shells": [{"inner": 0, "outer": 2, "value": 1}]})");
  r = invoke({"eval", "product", "--functions", chi.string(), chi2.string()});
  CHECK(json::parse(r.out)["shells"][0]["outer"].get<double>() == doctest::Approx(1.0));

  r = invoke({"eval", "ball-volume", "--d", "3"});
  CHECK(json::parse(r.out)["value"].get<double>() == doctest::Approx(4.0 * M_PI / 3.0));

  r = invoke({"eval", "make-g", "--eps", "0.5", "--K", "3", "--d", "1"});
  CHECK(json::parse(r.out)["shells"].size() == 2);

  r = invoke({"eval", "choose-eps", "--p", "1", "--q", "2", "--factors", "2/4,2/4", "--d", "1"});
  CHECK(json::parse(r.out)["value"].get<double>() == doctest::Approx(0.25));

  const auto phi = write_temp("mhl_phi_half.json", kPhiHalf);
  r = invoke({"eval", "phi", "--phi", phi.string(), "--r", "4"});
  CHECK(json::parse(r.out)["value"].get<double>() == doctest::Approx(0.5));

  CHECK(invoke({"eval"}).exit_code == 2);
}

TEST_CASE("verify-holder embedding modes") {
  const auto two = write_temp(
      "mhl_two.json",
      R"({"dim": 1, "shells": [{"inner": 0, "outer": 1, "value": 2}, {"inner": 1, "outer": 2, "value": 1}]})");
  auto r = invoke({"verify-holder", "--functions", two.string(), "--mode", "embedding",
                   "--p", "1", "--q", "1"});
  CHECK(r.exit_code == 0);
  const json payload = json::parse(r.out.substr(r.out.find('\n') + 1));
  CHECK(payload["lhs"].get<double>() == doctest::Approx(4.0));
  CHECK(payload["rhs"].get<double>() == doctest::Approx(6.0));

  const auto phi = write_temp("mhl_phi_half.json", kPhiHalf);
  r = invoke({"verify-holder", "--functions", two.string(), "--mode", "gen-embedding",
              "--p", "1", "--phi", phi.string()});
  CHECK(r.exit_code == 0);
}

TEST_CASE("norm requires --q or --phi") {
  const auto chi = write_temp("mhl_chi1.json", kChi1);
  const auto r = invoke({"norm", "--function", chi.string(), "--p", "1"});
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("--q or --phi") != std::string::npos);
}

TEST_CASE("falsify rejects K over the shell cap") {
  const auto r = invoke({"falsify", "--mode", "p", "--p", "2", "--q", "2", "--factors",
                         "2/4,2/4", "--d", "1", "--Kmax", "200000"});
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("capped") != std::string::npos);
}
