/* C API for the learned-gradient-flow toolkit.
 *
 * All entry points return lgf_status; on failure lgf_last_error() carries a
 * human-readable message for the calling thread. Experiments are opaque
 * handles created from a config document, optionally adjusted, run once,
 * and then queried for results.
 */
#ifndef LGF_H
#define LGF_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lgf_status {
  LGF_OK = 0,
  LGF_ERR_INVALID_ARG = 1, /* null/invalid handle or argument */
  LGF_ERR_PARSE = 2,       /* config document rejected */
  LGF_ERR_RUNTIME = 3,     /* numerical failure during the run */
  LGF_ERR_IO = 4,          /* file system failure */
  LGF_ERR_STATE = 5        /* query before run, or run called twice */
} lgf_status;

typedef struct lgf_experiment lgf_experiment;

const char* lgf_version(void);

/* Message for the most recent failure on this thread ("" if none). */
const char* lgf_last_error(void);

lgf_status lgf_experiment_create(const char* config_text, lgf_experiment** out);
lgf_status lgf_experiment_create_from_file(const char* path, lgf_experiment** out);
void lgf_experiment_destroy(lgf_experiment* exp);

/* Pre-run adjustments (CLI flags override the document). */
lgf_status lgf_experiment_set_seed(lgf_experiment* exp, unsigned long long seed);
lgf_status lgf_experiment_set_output_dir(lgf_experiment* exp, const char* dir);

/* Runs the experiment and writes the artifacts to the output directory. */
lgf_status lgf_experiment_run(lgf_experiment* exp);

/* Post-run queries. The summary is the report.txt text; `len` is the buffer
 * capacity and the needed size (including NUL) is stored back through it. */
lgf_status lgf_experiment_summary(const lgf_experiment* exp, char* buf, size_t* len);
lgf_status lgf_experiment_final_loss(const lgf_experiment* exp, double* out);
lgf_status lgf_experiment_acceleration(const lgf_experiment* exp, double* out);
lgf_status lgf_experiment_gradient_evals(const lgf_experiment* exp, long long* out);
lgf_status lgf_experiment_baseline_gradient_evals(const lgf_experiment* exp, long long* out);

/* Compares two run CSVs; writes the comparison text like the summary. */
lgf_status lgf_compare_csv(const char* path_a, const char* path_b, char* buf, size_t* len);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* LGF_H */
