#include "cwac/report.hpp"
#include "doctest.h"

using namespace cwac;

namespace {

const char* kFiniteDyadic = "bratteli 1\nfinite 2\nT 1 1 2\n0 0 1\n0 0 2\nT 1 1 2\n0 0 1\n0 0 2\n";

RunOutput run(const Json& j) { return run_job(parse_job(j)); }

std::string data(const char* file) { return std::string(CWAC_DATA_DIR) + "/" + file; }

Json* first_of_kind(Json& report, const std::string& kind) {
  for (Json& e : report["verdict"]["certificates"])
    if (e["certificate"].value("kind", "") == kind) return &e["certificate"];
  return nullptr;
}

bool all_valid(const Json& report) {
  auto checks = check_report_certificates(report);
  return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const CertificateCheck& c) { return c.valid; });
}

}  // namespace

TEST_CASE("job validation") {
  CHECK_THROWS_AS(parse_job(Json{{"command", "spectrum"}, {"x", "dyadic"}, {"colour", 1}}), ArgumentError);
  CHECK_THROWS_AS(parse_job(Json{{"command", "frobnicate"}}), ArgumentError);
  CHECK_THROWS_AS(parse_job(Json{{"x", "dyadic"}}), ArgumentError);
  CHECK_THROWS_AS(parse_job(Json{{"command", "spectrum"}, {"pmax", "8"}}), ArgumentError);
  CHECK_THROWS_AS(parse_job(Json{{"command", "spectrum"}, {"pmax", 0}}), ArgumentError);
  CHECK_THROWS(parse_job(Json{{"command", "eta"}, {"epsilon", "1/0"}}));
  CHECK_THROWS(parse_job(Json{{"command", "eta"}, {"epsilon", "0.3"}}));
  Json ok{{"command", "spectrum"}, {"x", "dyadic"}, {"pmax", 8}};
  CHECK(to_json(parse_job(ok)) == ok);
}

TEST_CASE("exit codes: decided, unknown, error") {
  RunOutput decided = run({{"command", "spectrum"}, {"x", "dyadic"}, {"pmax", 8}});
  CHECK(decided.exit_code == 0);
  CHECK(decided.report["verdict"]["members"] == Json({1, 2, 4, 8}));

  RunOutput unknown = run({{"command", "spectrum"}, {"x", kFiniteDyadic}, {"pmax", 8}});
  CHECK(unknown.exit_code == 2);
  CHECK(unknown.report["verdict"]["status"] == "partial");
  CHECK(unknown.report["verdict"]["members"] == Json({1, 2, 4}));
  CHECK(explain(unknown.report, 0).find("smallest unresolved query: p = 3") != std::string::npos);

  RunOutput missing = run({{"command", "spectrum"}, {"x", "/nonexistent/diagram.txt"}});
  CHECK(missing.exit_code == 1);
  CHECK(missing.report["verdict"]["status"] == "error");

  RunOutput parse = run({{"command", "spectrum"}, {"x", "bratteli 1\nfinite 1\nT 1 1 1\n0 0 x\n"}});
  CHECK(parse.exit_code == 1);
  CHECK(parse.report["verdict"]["error"]["line"] == 4);
}

TEST_CASE("reports are deterministic apart from timing") {
  Json job{{"command", "decide-wac"}, {"x", "odometer6"}, {"y", "dyadic"}, {"pmax", 12}};
  RunOutput a = run(job);
  Json four = job;
  four["threads"] = 4;
  RunOutput b = run(four), c = run(job);
  CHECK(verdict_section(a.report) == verdict_section(b.report));
  CHECK(verdict_section(a.report) == verdict_section(c.report));
  a.report.erase("timing"), c.report.erase("timing");
  CHECK(a.report.dump() == c.report.dump());
}

TEST_CASE("certificates survive a round trip and tampering is detected") {
  RunOutput r = run({{"command", "spectrum"}, {"x", "triadic"}, {"pmax", 9}});
  REQUIRE(r.exit_code == 0);
  CHECK(all_valid(r.report));
  Json round = Json::parse(r.report.dump(2));
  CHECK(all_valid(round));

  Json bad = round;
  Json* cert = first_of_kind(bad, "not_divisible");
  REQUIRE(cert);
  (*cert)["element"]["vector"][0] = (*cert)["p"];
  CHECK_FALSE(all_valid(bad));

  Json bad_set = round;
  Json* spec = first_of_kind(bad_set, "spectrum");
  REQUIRE(spec);
  (*spec)["p"] = (*spec)["p"].get<Count>() + 1;
  CHECK_FALSE(all_valid(bad_set));

  Json bad_digest = round;
  bad_digest["job"]["x"] = "dyadic";
  CHECK_FALSE(all_valid(bad_digest));
}

TEST_CASE("extension certificates are checked against the cocycle") {
  RunOutput r = run({{"command", "extension-spectrum"}, {"x", "triadic"}, {"c", data("triadic_one.zm")}, {"pmax", 12}});
  REQUIRE(r.exit_code == 0);
  CHECK(all_valid(r.report));
  Json bad = r.report;
  Json* cert = first_of_kind(bad, "ext_divisible");
  REQUIRE(cert);
  (*cert)["combination"][0] = (*cert)["combination"][0].get<Count>() + 1;
  CHECK_FALSE(all_valid(bad));
}

TEST_CASE("rationals stay exact") {
  RunOutput r = run({{"command", "orbit"}, {"x", "dyadic"}, {"phi", data("dyadic_rot.cocycle")},
                     {"path", std::vector<int>(6, 0)}, {"t", "1/3"}, {"steps", 3}});
  REQUIRE(r.exit_code == 0);
  const Json& rows = r.report["verdict"]["trajectory"];
  REQUIRE(rows.size() >= 2);
  CHECK(rows[0]["t"] == "1/3");
  for (const Json& row : rows) CHECK(row["t"].get<std::string>().find('.') == std::string::npos);
}

TEST_CASE("explain renders every verbosity") {
  RunOutput r = run({{"command", "spectrum"}, {"x", "fibonacci"}, {"pmax", 6}});
  const std::string terse = explain(r.report, 0), full = explain(r.report, 2);
  CHECK(terse.find("spectrum") == 0);
  CHECK(full.size() > explain(r.report, 1).size());
  CHECK(full.find("not_divisible") != std::string::npos);
}

TEST_CASE("refine budget is restored after a job") {
  const int before = refine_budget();
  run({{"command", "spectrum"}, {"x", "dyadic"}, {"pmax", 4}, {"refine_budget", 2}});
  CHECK(refine_budget() == before);
}
