#ifndef HMMVAE_H
#define HMMVAE_H

/* C interface to the switching-prior VAE experiment pipeline.
 *
 * Usage: open a config file, optionally override a few settings, then run
 * one of the three actions. Every call returns an hv_status; on any failure
 * hv_last_error() describes what went wrong (thread-local storage).
 */

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hv_status {
  HV_OK = 0,
  HV_ERR_CONFIG = 2,   /* unreadable, unparsable, or invalid configuration */
  HV_ERR_DIVERGED = 3, /* training produced a non-finite loss */
  HV_ERR_IO = 4,       /* reading or writing run outputs failed */
  HV_ERR_INVALID = 5   /* null handle, bad argument, or internal failure */
} hv_status;

/* opaque handle to a loaded experiment configuration */
typedef struct hv_config hv_config;

/* Parses and validates a JSON experiment config. Returns NULL on failure;
 * if status is non-NULL it receives the outcome either way. */
hv_config* hv_config_open(const char* path, hv_status* status);

/* releases a handle; NULL is a no-op */
void hv_config_close(hv_config* config);

/* Overrides both the episode-generation seed and the training seed, so the
 * whole run is re-keyed by one value. */
hv_status hv_config_set_seed(hv_config* config, uint64_t seed);

/* overrides the number of training epochs (must be at least 1) */
hv_status hv_config_set_epochs(hv_config* config, uint64_t epochs);

/* overrides the output directory (must be non-empty) */
hv_status hv_config_set_output_dir(hv_config* config, const char* dir);

/* enables (non-zero) or disables (zero) SVG plot rendering */
hv_status hv_config_set_plots(hv_config* config, int enabled);

/* Trains on the configured episode and writes CSV/JSON/SVG outputs into the
 * output directory. On HV_ERR_DIVERGED a partial loss trace and a
 * diagnostics file are still written. */
hv_status hv_run_experiment(hv_config* config);

/* generates the configured episode and saves it as JSON to out_path */
hv_status hv_generate_episode(hv_config* config, const char* out_path);

/* Runs all three prior variants on one shared episode, writing per-variant
 * outputs into branch1/2/3 subdirectories plus a comparison summary. */
hv_status hv_compare_branches(hv_config* config);

/* message for the most recent failure on this thread ("" if none) */
const char* hv_last_error(void);

/* short stable name for a status code, e.g. "config-error" */
const char* hv_status_name(hv_status status);

#ifdef __cplusplus
}
#endif

#endif /* HMMVAE_H */
