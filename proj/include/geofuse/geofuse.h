/* C API for the geofuse collaborative attitude estimation library.
 *
 * All functions return gf_status; on failure a human-readable message is
 * copied into the caller-supplied error buffer (always NUL-terminated,
 * may be truncated). Handles are opaque and freed with the matching
 * gf_*_free call; freeing NULL is a no-op.
 */
#ifndef GEOFUSE_GEOFUSE_H
#define GEOFUSE_GEOFUSE_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gf_status {
    GF_OK = 0,
    GF_ERR_IO = 1,        /* file not readable / not writable */
    GF_ERR_CONFIG = 2,    /* parse or validation failure */
    GF_ERR_DOMAIN = 3,    /* mathematical domain violation */
    GF_ERR_SELFTEST = 4,  /* one or more selftest groups failed */
    GF_ERR_INTERNAL = 5
} gf_status;

typedef struct gf_config gf_config;    /* scenario configuration */
typedef struct gf_summary gf_summary;  /* Monte-Carlo result summary */

const char* gf_version(void);

/* --- configuration ------------------------------------------------------ */

/* Load a JSON scenario configuration from path. The document is validated. */
gf_status gf_config_load(const char* path, gf_config** out,
                         char* errbuf, size_t errlen);

/* The built-in two-agent experiment configuration (1000 runs, 60 s). */
gf_status gf_config_default(gf_config** out, char* errbuf, size_t errlen);

/* Apply a dotted-path override, e.g. ("monte_carlo.num_runs", "100"),
 * then re-validate. */
gf_status gf_config_set(gf_config* cfg, const char* key, const char* value,
                        char* errbuf, size_t errlen);

void gf_config_free(gf_config* cfg);

/* --- execution ---------------------------------------------------------- */

/* Run the Monte-Carlo experiment. threads = 0 picks hardware concurrency;
 * the thread count never changes numeric output. */
gf_status gf_run_monte_carlo(const gf_config* cfg, int threads, gf_summary** out,
                             char* errbuf, size_t errlen);

/* Number of recorded time steps (duration/dt + 1). */
int gf_summary_num_steps(const gf_summary* s);

/* Write errors.csv and run_meta.json into out_dir (created if missing). */
gf_status gf_summary_write(const gf_summary* s, const char* out_dir,
                           char* errbuf, size_t errlen);

void gf_summary_free(gf_summary* s);

/* --- selftest ----------------------------------------------------------- */

/* Run the fast oracle suite, printing one pass/fail line per group to
 * stdout. Returns GF_OK only if every group passed. */
gf_status gf_selftest(void);

#ifdef __cplusplus
}
#endif

#endif /* GEOFUSE_GEOFUSE_H */
