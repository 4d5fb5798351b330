#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cwac/circle.hpp"

namespace cwac {

inline constexpr const char* kToolVersion = "1.0.0";

/// A batch job. Inputs name builtin diagrams ("dyadic", "fibonacci", ...), files,
/// or inline text starting with "bratteli" / "cocycle".
struct JobSpec {
  std::string command;
  Json params = Json::object();  // every key other than "command"
};

/// Rejects unknown keys and malformed values.
JobSpec parse_job(const Json& j);
Json to_json(const JobSpec& job);

struct RunOutput {
  Json report;
  int exit_code = 1;  // 0 decided, 2 unknown, 1 error
};

/// Never throws: errors become reports with exit code 1.
RunOutput run_job(const JobSpec& job);

/// Deterministic part of a report, serialized canonically.
std::string verdict_section(const Json& report);

/// 0: verdict line; 1: tables; 2: everything, certificates included.
std::string explain(const Json& report, int verbosity);

// Input resolution shared with the certificate checker.
struct LoadedDiagram {
  DiagramPtr diagram;
  std::string digest;
};
LoadedDiagram load_diagram_input(const std::string& spec);
std::string load_text_input(const std::string& spec);
std::string sha256_hex(const std::string& data);

struct CertificateCheck {
  std::string label;
  std::string kind;
  bool valid = false;
  std::string detail;
};

/// Re-verifies every certificate listed in a report from its recorded inputs,
/// without repeating the searches that produced them.
std::vector<CertificateCheck> check_report_certificates(const Json& report);

/// One certificate against its system; `c` is needed for extension certificates.
bool check_certificate(const Json& cert, const BratteliDiagram& d, const ZmCocycle* c, std::string* why);

}  // namespace cwac
