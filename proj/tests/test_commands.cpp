#include <doctest.h>

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "wander/commands.hpp"
#include "wander/rational.hpp"

using namespace wander;

namespace {
std::string slurp(const std::string& path) {
  std::ifstream is(path);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}
}  // namespace

TEST_CASE("certify emits a deterministic certificate with positive margins") {
  commands::Options o;
  o.horizon = 5;
  o.stages = 2;
  o.out = "cmd_cert_a.json";
  std::ostringstream log;
  REQUIRE(commands::cmd_certify(o, log) == 0);
  o.out = "cmd_cert_b.json";
  REQUIRE(commands::cmd_certify(o, log) == 0);
  CHECK(slurp("cmd_cert_a.json") == slurp("cmd_cert_b.json"));

  const auto cert = nlohmann::json::parse(slurp("cmd_cert_a.json"));
  CHECK(cert.at("margins_positive") == true);
  CHECK(cert.at("trace_summary").at("consistent") == true);
  CHECK(cert.at("tool").at("name") == "wander");
  // the J=5, K=2 anchors
  CHECK(cert.at("plan").at("l")[0] == 4);
  CHECK(cert.at("plan").at("m")[0] == 16);
  for (const auto& m : cert.at("margins"))
    CHECK(rat_parse(m.at("margin").get<std::string>()) > 0);
}

TEST_CASE("certify rejects a horizon below the stage count") {
  commands::Options o;
  o.horizon = 2;
  o.stages = 2;
  o.out = "cmd_cert_bad.json";
  std::ostringstream log;
  CHECK(commands::cmd_certify(o, log) == 2);
  const auto err = nlohmann::json::parse(slurp("cmd_cert_bad.json"));
  CHECK(err.at("error").at("type") == "HorizonExceeded");
  CHECK(err.at("error").at("exit") == 2);
}

TEST_CASE("verify runs the full suite green") {
  commands::Options o;
  o.horizon = 4;
  o.trials = 20;
  o.out = "cmd_report.json";
  std::ostringstream log;
  CHECK(commands::cmd_verify(o, log) == 0);
  const auto rep = nlohmann::json::parse(slurp("cmd_report.json"));
  CHECK(rep.at("lemma") == "all");
  CHECK(rep.at("failures") == 0);
  CHECK(rep.at("reports").size() == 5);
}

TEST_CASE("verify trials=0 is vacuously green") {
  commands::Options o;
  o.horizon = 4;
  o.trials = 0;
  o.lemma = "norms";
  o.out = "cmd_report0.json";
  std::ostringstream log;
  CHECK(commands::cmd_verify(o, log) == 0);
}

TEST_CASE("tampered verify fails with exit 3") {
  commands::Options o;
  o.horizon = 4;
  o.trials = 20;
  o.lemma = "norms";
  o.drop_factor = 1;
  o.out = "cmd_report_tamper.json";
  std::ostringstream log;
  CHECK(commands::cmd_verify(o, log) == 3);
}

TEST_CASE("unknown lemma selector is a precondition error") {
  commands::Options o;
  o.horizon = 4;
  o.lemma = "nonsense";
  o.out = "cmd_report_bad.json";
  std::ostringstream log;
  CHECK(commands::cmd_verify(o, log) == 2);
  const auto err = nlohmann::json::parse(slurp("cmd_report_bad.json"));
  CHECK(err.at("error").at("type") == "OutOfConfiguredRange");
}

TEST_CASE("connect demo transcript is certified and deterministic") {
  commands::Options o;
  o.out = "cmd_transcript_a.json";
  std::ostringstream log;
  REQUIRE(commands::cmd_connect_demo(o, log) == 0);
  o.out = "cmd_transcript_b.json";
  REQUIRE(commands::cmd_connect_demo(o, log) == 0);
  CHECK(slurp("cmd_transcript_a.json") == slurp("cmd_transcript_b.json"));

  const auto tr = nlohmann::json::parse(slurp("cmd_transcript_a.json"));
  CHECK(tr.at("perturbation_valuation").at("match") == true);
  CHECK(tr.at("derivative_valuation").at("match") == true);
  CHECK(tr.at("itinerary").at("fully_certified") == true);
  CHECK(rat_parse(tr.at("residual_valuation").get<std::string>()) >= 40);
  CHECK(tr.at("orbit").size() >= 14);
}

TEST_CASE("connect demo rejects unsupported primes") {
  commands::Options o;
  o.prime = 5;
  o.out = "cmd_transcript_bad.json";
  std::ostringstream log;
  CHECK(commands::cmd_connect_demo(o, log) == 2);
}
