/* fpl: frequency-principle laboratory, C interface.
 *
 * Opaque handles plus integer status codes. Every function that can fail
 * returns an fpl_status; fpl_last_error() describes the most recent failure
 * on the calling thread. Strings returned through char** are owned by the
 * caller and released with fpl_string_free().
 */
#ifndef FPL_H
#define FPL_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fpl_status {
    FPL_OK = 0,
    FPL_ERR_INVALID_ARGUMENT = 1,
    FPL_ERR_IO = 2,
    FPL_ERR_BAD_CONFIG = 3,
    FPL_ERR_NUMERIC = 4,
    FPL_ERR_INTERNAL = 5
} fpl_status;

const char* fpl_version(void);
const char* fpl_status_name(fpl_status status);

/* thread-local message for the last failing call; empty string if none */
const char* fpl_last_error(void);

/* ---- configuration ---------------------------------------------------- */

typedef struct fpl_config fpl_config;

fpl_config* fpl_config_new(void);
void fpl_config_free(fpl_config* config);

/* flat `key = value` file; '#' comments */
fpl_status fpl_config_load_file(fpl_config* config, const char* path);
fpl_status fpl_config_set(fpl_config* config, const char* key, const char* value);
/* NULL when the key is unset; pointer lives until the next mutation */
const char* fpl_config_get(const fpl_config* config, const char* key);

/* ---- experiments ------------------------------------------------------ */

size_t fpl_experiment_count(void);
const char* fpl_experiment_name(size_t index);

/* Runs one named experiment, writing CSV traces, SVG figures (emit_svg != 0)
 * and manifest.json under out_dir. On success *manifest_json_out (when not
 * NULL) receives the manifest. Unknown config keys fail with
 * FPL_ERR_BAD_CONFIG and the key name in fpl_last_error(). */
fpl_status fpl_run_experiment(const char* name, const fpl_config* config, const char* out_dir,
                              int emit_svg, char** manifest_json_out);

void fpl_string_free(char* s);

/* ---- direct diagnostics ------------------------------------------------ */

/* yhat_k = (1/n) sum_i y_i e^{-i 2 pi i k / n}; re_out/im_out hold n values */
fpl_status fpl_dft_1d(const double* samples, size_t n, double* re_out, double* im_out);

/* Gaussian low/high split of labels (n x c) against inputs (n x d); low_out
 * and high_out hold n*c values each. delta is the variance-like width in
 * exp(-|r|^2 / (2 delta)). */
fpl_status fpl_gaussian_low_high_split(const double* inputs, size_t n, size_t d,
                                       const double* labels, size_t c, double delta,
                                       double* low_out, double* high_out);

/* exact parity transform (-i)^d prod_j sin(2 pi k_j) */
fpl_status fpl_parity_exact_ft(size_t d, const double* k, double* re_out, double* im_out);

#ifdef __cplusplus
}
#endif

#endif /* FPL_H */
