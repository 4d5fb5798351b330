/* C interface to the cwac library. All handles are opaque; every function
 * returning cwac_status leaves a message in cwac_last_error() on failure. */
#ifndef CWAC_H
#define CWAC_H

#include <stddef.h>
#include <stdint.h>

#if defined(CWAC_BUILDING_LIBRARY)
#define CWAC_API __attribute__((visibility("default")))
#else
#define CWAC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  CWAC_OK = 0,
  CWAC_E_ARGUMENT = 1,
  CWAC_E_PARSE = 2,
  CWAC_E_STRUCTURAL = 3,
  CWAC_E_DEPTH = 4,
  CWAC_E_PARTITION = 5,
  CWAC_E_CONTRACT = 6,
  CWAC_E_UNKNOWN = 7,
  CWAC_E_OVERFLOW = 8,
  CWAC_E_IO = 9,
  CWAC_E_INTERNAL = 100
} cwac_status;

typedef struct cwac_diagram cwac_diagram;
typedef struct cwac_report cwac_report;

CWAC_API const char* cwac_version(void);
/* Thread-local; valid until the next failing call on the same thread. */
CWAC_API const char* cwac_last_error(void);
CWAC_API void cwac_string_free(char* s);
CWAC_API cwac_status cwac_set_refine_budget(int levels);

/* Diagrams: builtin name, text in the diagram format, or a file path. */
CWAC_API cwac_status cwac_diagram_builtin(const char* name, cwac_diagram** out);
CWAC_API cwac_status cwac_diagram_parse(const char* text, cwac_diagram** out);
CWAC_API cwac_status cwac_diagram_load(const char* path, cwac_diagram** out);
CWAC_API void cwac_diagram_free(cwac_diagram* d);
CWAC_API cwac_status cwac_diagram_serialize(const cwac_diagram* d, char** out);
/* Tower heights at `level`; writes up to `cap` values and sets *count to the total. */
CWAC_API cwac_status cwac_diagram_heights(const cwac_diagram* d, int level, int64_t* heights, size_t cap,
                                          size_t* count);

/* Periodic spectrum up to p_max: verdicts[p-1] is 1 yes, 0 no, -1 unknown. */
CWAC_API cwac_status cwac_spectrum(const cwac_diagram* d, int64_t p_max, int bound, int threads, int* verdicts);

/* Jobs: a JSON object {"command": ..., params}. Failures inside the job still
 * produce a report (exit code 1); malformed JSON or an invalid job fails the call. */
CWAC_API cwac_status cwac_run_job(const char* job_json, cwac_report** out);
CWAC_API int cwac_report_exit_code(const cwac_report* r);
CWAC_API cwac_status cwac_report_json(const cwac_report* r, int indent, char** out);
CWAC_API cwac_status cwac_report_verdict(const cwac_report* r, char** out);
CWAC_API cwac_status cwac_report_text(const cwac_report* r, int verbosity, char** out);
CWAC_API void cwac_report_free(cwac_report* r);

/* Re-checks a report's input digests and certificates. *all_valid is 1 when every
 * entry passes; *details receives a JSON array of {label, kind, valid, detail}. */
CWAC_API cwac_status cwac_check_certificates(const char* report_json, int* all_valid, char** details);

#ifdef __cplusplus
}
#endif

#endif
