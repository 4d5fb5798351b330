#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstring>
#include <string>
#include <vector>

#include "cwac.h"
#include "doctest.h"

namespace {

std::string take(char* s) {
  std::string out = s ? s : "";
  cwac_string_free(s);
  return out;
}

}  // namespace

TEST_CASE("version and builtin diagrams") {
  CHECK(std::strlen(cwac_version()) > 0);
  cwac_diagram* d = nullptr;
  REQUIRE(cwac_diagram_builtin("fibonacci", &d) == CWAC_OK);
  int64_t h[4] = {0, 0, 0, 0};
  size_t count = 0;
  REQUIRE(cwac_diagram_heights(d, 4, h, 4, &count) == CWAC_OK);
  CHECK(count == 2);
  CHECK(h[0] == 5);
  CHECK(h[1] == 3);
  CHECK(cwac_diagram_heights(d, 4, h, 1, &count) == CWAC_OK);
  CHECK(count == 2);

  char* text = nullptr;
  REQUIRE(cwac_diagram_serialize(d, &text) == CWAC_OK);
  cwac_diagram* again = nullptr;
  CHECK(cwac_diagram_parse(text, &again) == CWAC_OK);
  cwac_string_free(text);
  cwac_diagram_free(again);
  cwac_diagram_free(d);
}

TEST_CASE("errors come back as status codes") {
  cwac_diagram* d = nullptr;
  CHECK(cwac_diagram_builtin("no-such-system", &d) == CWAC_E_ARGUMENT);
  CHECK(d == nullptr);
  CHECK(std::strlen(cwac_last_error()) > 0);
  CHECK(cwac_diagram_parse("bratteli 1\nfinite 1\nT 1 1 1\n0 0 x\n", &d) == CWAC_E_PARSE);
  CHECK(std::string(cwac_last_error()).find("line 4") != std::string::npos);
  CHECK(cwac_diagram_load("/nonexistent/diagram.txt", &d) == CWAC_E_IO);
  CHECK(cwac_diagram_builtin(nullptr, &d) == CWAC_E_ARGUMENT);
  cwac_report* r = nullptr;
  CHECK(cwac_run_job("{not json", &r) != CWAC_OK);
  CHECK(cwac_run_job(R"({"command":"spectrum","x":"dyadic","colour":1})", &r) == CWAC_E_ARGUMENT);
  CHECK(r == nullptr);
}

TEST_CASE("spectrum verdicts") {
  cwac_diagram* d = nullptr;
  REQUIRE(cwac_diagram_builtin("odometer6", &d) == CWAC_OK);
  int v[8];
  REQUIRE(cwac_spectrum(d, 8, 40, 1, v) == CWAC_OK);
  CHECK(std::vector<int>(v, v + 8) == std::vector<int>{1, 1, 1, 1, 0, 1, 0, 1});
  cwac_diagram_free(d);
}

TEST_CASE("jobs, reports and certificate checks") {
  cwac_report* r = nullptr;
  REQUIRE(cwac_run_job(R"({"command":"spectrum","x":"triadic","pmax":9})", &r) == CWAC_OK);
  CHECK(cwac_report_exit_code(r) == 0);
  char* verdict = nullptr;
  REQUIRE(cwac_report_verdict(r, &verdict) == CWAC_OK);
  CHECK(take(verdict).find("\"members\":[1,3,9]") != std::string::npos);
  char* text = nullptr;
  REQUIRE(cwac_report_text(r, 1, &text) == CWAC_OK);
  CHECK(take(text).rfind("spectrum: decided", 0) == 0);
  char* json = nullptr;
  REQUIRE(cwac_report_json(r, 2, &json) == CWAC_OK);
  std::string report = take(json);
  cwac_report_free(r);

  int ok = 0;
  char* details = nullptr;
  REQUIRE(cwac_check_certificates(report.c_str(), &ok, &details) == CWAC_OK);
  CHECK(ok == 1);
  CHECK(take(details).find("\"valid\":false") == std::string::npos);

  std::string tampered = report;
  const auto at = tampered.find("\"sha256\": \"");
  REQUIRE(at != std::string::npos);
  char& c = tampered[at + 11];
  c = c == '0' ? '1' : '0';
  REQUIRE(cwac_check_certificates(tampered.c_str(), &ok, &details) == CWAC_OK);
  CHECK(ok == 0);
  cwac_string_free(details);
}

TEST_CASE("exit codes of unknown and failing jobs") {
  cwac_report* r = nullptr;
  const char* finite = R"({"command":"spectrum","pmax":8,"x":"bratteli 1\nfinite 2\nT 1 1 2\n0 0 1\n0 0 2\nT 1 1 2\n0 0 1\n0 0 2\n"})";
  REQUIRE(cwac_run_job(finite, &r) == CWAC_OK);
  CHECK(cwac_report_exit_code(r) == 2);
  cwac_report_free(r);
  REQUIRE(cwac_run_job(R"({"command":"spectrum","x":"/nonexistent/diagram.txt"})", &r) == CWAC_OK);
  CHECK(cwac_report_exit_code(r) == 1);
  cwac_report_free(r);
}

TEST_CASE("refine budget setter validates its argument") {
  CHECK(cwac_set_refine_budget(-1) == CWAC_E_ARGUMENT);
  CHECK(cwac_set_refine_budget(8) == CWAC_OK);
}
