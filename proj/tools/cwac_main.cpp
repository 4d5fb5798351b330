#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cwac.h"
#include "json.hpp"

using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string take(char* s) {
  std::string out = s ? s : "";
  cwac_string_free(s);
  return out;
}

int check_mode(const std::string& path, const std::string& format) {
  int all_valid = 0;
  char* details = nullptr;
  if (cwac_check_certificates(slurp(path).c_str(), &all_valid, &details) != CWAC_OK) {
    std::cerr << "error: " << cwac_last_error() << '\n';
    return 1;
  }
  json checks = json::parse(take(details));
  if (format == "structured") {
    std::cout << json{{"tool", "cwac"}, {"version", cwac_version()}, {"mode", "check-certificate"}, {"report", path},
                      {"all_valid", all_valid == 1}, {"checks", checks}}
                     .dump(2)
              << '\n';
  } else {
    for (const auto& c : checks)
      std::cout << (c["valid"].get<bool>() ? "ok   " : "FAIL ") << c["kind"].get<std::string>() << "  "
                << c["label"].get<std::string>() << (c["detail"].get<std::string>().empty() ? "" : "  (" + c["detail"].get<std::string>() + ")")
                << '\n';
    std::cout << (all_valid ? "all certificates verified" : "some certificates failed") << " (" << checks.size() << " checked)\n";
  }
  return all_valid ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cantor minimal systems: periodic spectra, approximate conjugacy, circle skew products"};
  app.set_version_flag("--version", std::string(cwac_version()));
  app.require_subcommand(0, 1);

  std::string format = "text", check_path, job_path;
  int verbosity = 1;
  app.add_option("--format", format, "text or structured")->check(CLI::IsMember({"text", "structured"}));
  app.add_option("--check-certificate", check_path, "re-verify the certificates of a structured report");
  app.add_option("--job", job_path, "run a JSON job file");
  app.fallthrough();
  app.add_option("-v,--verbosity", verbosity, "0 verdict only, 1 tables, 2 everything")->check(CLI::Range(0, 2));

  json job = json::object();
  std::vector<std::pair<std::string, CLI::App*>> commands;
  auto sub = [&](const char* name, const char* help) {
    CLI::App* s = app.add_subcommand(name, help);
    commands.emplace_back(name, s);
    return s;
  };
  // Options shared by name; each subcommand exposes only the ones it reads.
  struct Opt {
    const char* flag;
    const char* key;
    bool integer;
  };
  const std::vector<Opt> all{{"--x", "x", false},          {"--y", "y", false},          {"--phi", "phi", false},
                             {"--psi", "psi", false},      {"--c", "c", false},          {"--levels", "levels", true},
                             {"--bound", "bound", true},   {"--pmax", "pmax", true},     {"--threads", "threads", true},
                             {"--level", "level", true},   {"--epsilon", "epsilon", false}, {"--n", "n", true},
                             {"--steps", "steps", true},   {"--t", "t", false},          {"--refine-budget", "refine_budget", true}};
  std::map<std::string, std::string> svals;
  std::map<std::string, long long> ivals;
  std::string m_list, chi_list, path_list;
  auto wire = [&](CLI::App* s, std::initializer_list<const char*> keys) {
    s->add_option("--refine-budget", ivals["refine_budget"], "extra levels the Vershik map may descend");
    for (const char* k : keys)
      for (const Opt& o : all)
        if (std::string(o.key) == k) {
          if (o.integer)
            s->add_option(o.flag, ivals[o.key]);
          else
            s->add_option(o.flag, svals[o.key]);
        }
  };
  wire(sub("validate", "structural checks on a diagram"), {"x", "levels"});
  wire(sub("spectrum", "periodic spectrum up to --pmax"), {"x", "pmax", "bound", "threads"});
  wire(sub("decide-wac", "weak approximate conjugacy of X and Y"), {"x", "y", "pmax", "bound", "threads"});
  wire(sub("synthesize", "build an approximate conjugator X -> Y"), {"x", "y", "level", "bound"});
  wire(sub("decide-wacxt", "approximate conjugacy of circle skew products"), {"x", "y", "phi", "psi", "pmax", "bound"});
  wire(sub("straighten", "straighten an orientation-trivial cocycle"), {"x", "phi", "bound"});
  wire(sub("eta", "rotation transfer within epsilon"), {"x", "y", "phi", "psi", "epsilon", "level", "bound"});
  wire(sub("omega", "isometry-valued transfer along a synthesized map"), {"x", "y", "phi", "psi", "level", "bound"});
  CLI::App* comb = sub("combina", "coin problem with parity");
  comb->add_option("--m", m_list, "comma separated")->required();
  comb->add_option("--chi", chi_list, "comma separated")->required();
  wire(comb, {"n"});
  wire(sub("extension-torsion", "K0 torsion of the Z/m extension"), {"x", "c", "level", "bound"});
  wire(sub("extension-spectrum", "periodic spectrum of the Z/m extension"), {"x", "c", "pmax", "bound"});
  CLI::App* orbit = sub("orbit", "skew-product orbit from a path prefix");
  orbit->add_option("--path", path_list, "comma separated edge choices")->required();
  wire(orbit, {"x", "phi", "t", "steps"});

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (!check_path.empty()) return check_mode(check_path, format);
    std::string command;
    for (auto& [name, s] : commands)
      if (s->parsed()) {
        command = name;
        job["command"] = name;
        for (const Opt& o : all) {
          if (!s->get_option_no_throw(o.flag) || s->get_option(o.flag)->count() == 0) continue;
          if (o.integer)
            job[o.key] = ivals[o.key];
          else
            job[o.key] = svals[o.key];
        }
      }
    auto list = [](const std::string& text) {
      json out = json::array();
      std::stringstream ss(text);
      for (std::string item; std::getline(ss, item, ',');) out.push_back(std::stoll(item));
      return out;
    };
    if (command == "combina") job["m"] = list(m_list), job["chi"] = list(chi_list);
    if (command == "orbit") job["path"] = list(path_list);
    if (!job_path.empty()) job = json::parse(slurp(job_path));
    if (!job.contains("command")) {
      std::cerr << app.help();
      return 1;
    }
    cwac_report* report = nullptr;
    if (cwac_run_job(job.dump().c_str(), &report) != CWAC_OK) {
      std::cerr << "error: " << cwac_last_error() << '\n';
      return 1;
    }
    char* text = nullptr;
    if (format == "structured")
      cwac_report_json(report, 2, &text);
    else
      cwac_report_text(report, verbosity, &text);
    std::cout << take(text);
    if (format == "structured") std::cout << '\n';
    const int code = cwac_report_exit_code(report);
    cwac_report_free(report);
    return code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
