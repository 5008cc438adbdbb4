/* C interface to the online p-mean welfare library.
 *
 * All functions return a pmean_status; PMEAN_OK is zero. Out parameters are
 * written only on success. Strings returned through char** are heap-allocated
 * and must be released with pmean_free_string. A human-readable description of
 * the most recent failure on the calling thread is available via
 * pmean_last_error.
 *
 * Reports and configurations travel as JSON text; the schemas are documented
 * in the project README.
 */
#ifndef PMEAN_PMEAN_H
#define PMEAN_PMEAN_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pmean_status {
    PMEAN_OK = 0,
    PMEAN_ERR_INVALID_ARGUMENT = 1,
    PMEAN_ERR_PARSE = 2,
    PMEAN_ERR_SCALING = 3,
    PMEAN_ERR_DIMENSION = 4,
    PMEAN_ERR_DOMAIN = 5,
    PMEAN_ERR_SIZE = 6,
    PMEAN_ERR_CHECK_FAILED = 7,
    PMEAN_ERR_IO = 8,
    PMEAN_ERR_INTERNAL = 9
} pmean_status;

/* Stable name for a status code, e.g. "scaling". Never NULL. */
const char* pmean_status_name(pmean_status status);

/* Detail message for the last failure on this thread; empty string if none. */
const char* pmean_last_error(void);

void pmean_free_string(char* text);

/* ------------------------------------------------------------------ */
/* Instances                                                            */

typedef struct pmean_instance pmean_instance;

/* Loads a .json or .csv instance file. */
pmean_status pmean_instance_load(const char* path, pmean_instance** out);
pmean_status pmean_instance_parse_json(const char* text, pmean_instance** out);
pmean_status pmean_instance_parse_csv(const char* text, pmean_instance** out);

/* spec: {"kind":"random_dirichlet"|"random_sparse","n":int,"t":int,"seed":int} */
pmean_status pmean_instance_generate(const char* spec_json, pmean_instance** out);

pmean_status pmean_instance_save(const pmean_instance* instance, const char* path);
pmean_status pmean_instance_to_json(const pmean_instance* instance, char** out_text);

int pmean_instance_agents(const pmean_instance* instance);
long long pmean_instance_goods(const pmean_instance* instance);

/* PMEAN_OK when every agent's values sum to 1 within tolerance, otherwise
 * PMEAN_ERR_SCALING with the worst offender in report_json (which is written
 * in both cases when non-NULL). */
pmean_status pmean_instance_validate_scaling(const pmean_instance* instance, char** report_json);

/* paper_split != 0 replaces every good by n^2 copies; otherwise only goods
 * above the 1/n^2 cap are split, into ceil(n^2 * max value) copies. */
pmean_status pmean_instance_split_to_cap(const pmean_instance* instance, int paper_split,
                                         pmean_instance** out);

void pmean_instance_free(pmean_instance* instance);

/* ------------------------------------------------------------------ */
/* Welfare helpers                                                      */

/* p is a decimal or one of the aliases nsw, egal, -inf, util. */
pmean_status pmean_p_mean(const double* values, int n, const char* p, double* out);

/* Table threshold for (p, n); universal != 0 ignores p and returns
 * 8 sqrt(n) log2(2n). */
pmean_status pmean_threshold(const char* p, int n, int universal, double* out);

/* ------------------------------------------------------------------ */
/* Experiment pipelines                                                 */
/*
 * config_json fields (all optional unless noted):
 *   p            exponent (string or number)
 *   p_grid       array of exponents (bench)
 *   threshold    "table" | "universal" | "manual"
 *   phi          manual threshold (required when threshold = "manual")
 *   algorithm    "alg" | "greedy" | "uniform"
 *   split        "minimal" | "paper"
 *   diagnostics  "off" | "lemmas" | "full"
 *   oracle       bool: also compute the offline benchmark and ratio
 *   oracle_budget  iterations for the conditional-gradient oracle
 *   oracle_method  "fw" | "grid"   (oracle pipeline)
 *   grid_step    0.25 | 0.125
 *   seed         integer
 *   generator    {"kind":...,"n":...,"t":...,"p":...,"seed":...}
 *   embed_transcript  bool (adversary)
 *   validate_n   array of agent counts for the validate suites
 */

pmean_status pmean_run(const pmean_instance* instance, const char* config_json, char** report_json);
pmean_status pmean_oracle(const pmean_instance* instance, const char* config_json,
                          char** report_json);

/* instance may be NULL when config_json carries a generator. */
pmean_status pmean_bench(const pmean_instance* instance, const char* config_json,
                         char** report_json);

/* Adaptive lower-bound constructions; the adapted transcript is embedded in
 * the report when embed_transcript is set. */
pmean_status pmean_adversary(const char* config_json, char** report_json);

/* Runs the library's property suites, or validates config's "instance" file.
 * Returns PMEAN_ERR_CHECK_FAILED when a suite fails; report_json is still
 * written. */
pmean_status pmean_validate(const char* config_json, char** report_json);

/* Flat CSV projection of a report produced by the calls above. */
pmean_status pmean_report_to_csv(const char* report_json, char** csv_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* PMEAN_PMEAN_H */
