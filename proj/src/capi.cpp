#include "cwac.h"

#include <cstring>
#include <string>

#include "cwac/report.hpp"

struct cwac_diagram {
  cwac::DiagramPtr d;
};

struct cwac_report {
  cwac::Json report;
  int exit_code = 1;
};

namespace {

thread_local std::string g_last_error;

cwac_status fail(cwac_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

template <class F>
cwac_status guarded(F&& f) {
  try {
    f();
    return CWAC_OK;
  } catch (const cwac::Error& e) {
    return fail(static_cast<cwac_status>(e.code()), e.what());
  } catch (const cwac::Json::exception& e) {
    return fail(CWAC_E_PARSE, e.what());
  } catch (const std::exception& e) {
    return fail(CWAC_E_INTERNAL, e.what());
  }
}

char* dup(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

#define CWAC_REQUIRE(cond) \
  if (!(cond)) return fail(CWAC_E_ARGUMENT, "null argument: " #cond)

cwac_status wrap(cwac::BratteliDiagram d, cwac_diagram** out) {
  *out = new cwac_diagram{std::make_shared<const cwac::BratteliDiagram>(std::move(d))};
  return CWAC_OK;
}

}  // namespace

extern "C" {

const char* cwac_version(void) { return cwac::kToolVersion; }
const char* cwac_last_error(void) { return g_last_error.c_str(); }
void cwac_string_free(char* s) { delete[] s; }

cwac_status cwac_set_refine_budget(int levels) {
  if (levels < 0) return fail(CWAC_E_ARGUMENT, "budget must be nonnegative");
  cwac::set_refine_budget(levels);
  return CWAC_OK;
}

cwac_status cwac_diagram_builtin(const char* name, cwac_diagram** out) {
  CWAC_REQUIRE(name && out);
  return guarded([&] { wrap(cwac::builtin_diagram(name), out); });
}

cwac_status cwac_diagram_parse(const char* text, cwac_diagram** out) {
  CWAC_REQUIRE(text && out);
  return guarded([&] { wrap(cwac::parse_diagram(text), out); });
}

cwac_status cwac_diagram_load(const char* path, cwac_diagram** out) {
  CWAC_REQUIRE(path && out);
  return guarded([&] { wrap(cwac::parse_diagram(cwac::read_text_file(path)), out); });
}

void cwac_diagram_free(cwac_diagram* d) { delete d; }

cwac_status cwac_diagram_serialize(const cwac_diagram* d, char** out) {
  CWAC_REQUIRE(d && out);
  return guarded([&] { *out = dup(cwac::serialize_diagram(*d->d)); });
}

cwac_status cwac_diagram_heights(const cwac_diagram* d, int level, int64_t* heights, size_t cap, size_t* count) {
  CWAC_REQUIRE(d && count && (heights || cap == 0));
  return guarded([&] {
    auto h = cwac::kr_partition(*d->d, level).heights;
    *count = h.size();
    for (size_t i = 0; i < h.size() && i < cap; ++i) heights[i] = h[i];
  });
}

cwac_status cwac_spectrum(const cwac_diagram* d, int64_t p_max, int bound, int threads, int* verdicts) {
  CWAC_REQUIRE(d && verdicts && p_max >= 1);
  return guarded([&] {
    auto entries = cwac::periodic_spectrum(*d->d, p_max, bound, threads);
    for (size_t i = 0; i < entries.size(); ++i)
      verdicts[i] = entries[i].result.yes() ? 1 : entries[i].result.no() ? 0 : -1;
  });
}

cwac_status cwac_run_job(const char* job_json, cwac_report** out) {
  CWAC_REQUIRE(job_json && out);
  return guarded([&] {
    cwac::JobSpec job = cwac::parse_job(cwac::Json::parse(job_json));
    cwac::RunOutput r = cwac::run_job(job);
    *out = new cwac_report{std::move(r.report), r.exit_code};
  });
}

int cwac_report_exit_code(const cwac_report* r) { return r ? r->exit_code : 1; }

cwac_status cwac_report_json(const cwac_report* r, int indent, char** out) {
  CWAC_REQUIRE(r && out);
  return guarded([&] { *out = dup(r->report.dump(indent)); });
}

cwac_status cwac_report_verdict(const cwac_report* r, char** out) {
  CWAC_REQUIRE(r && out);
  return guarded([&] { *out = dup(cwac::verdict_section(r->report)); });
}

cwac_status cwac_report_text(const cwac_report* r, int verbosity, char** out) {
  CWAC_REQUIRE(r && out);
  return guarded([&] { *out = dup(cwac::explain(r->report, verbosity)); });
}

void cwac_report_free(cwac_report* r) { delete r; }

cwac_status cwac_check_certificates(const char* report_json, int* all_valid, char** details) {
  CWAC_REQUIRE(report_json && all_valid);
  return guarded([&] {
    auto checks = cwac::check_report_certificates(cwac::Json::parse(report_json));
    cwac::Json arr = cwac::Json::array();
    bool ok = true;
    for (const auto& c : checks) {
      ok = ok && c.valid;
      arr.push_back({{"label", c.label}, {"kind", c.kind}, {"valid", c.valid}, {"detail", c.detail}});
    }
    *all_valid = ok ? 1 : 0;
    if (details) *details = dup(arr.dump(2));
  });
}

}  // extern "C"
