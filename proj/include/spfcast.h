/* C interface to the spfcast inflation-forecast evaluation engine.
 *
 * Conventions:
 *   - Every function returns a spfcast_status (SPFCAST_OK on success).
 *   - On failure, spfcast_last_error() returns a thread-local message.
 *   - Objects behind opaque handles are created by the library and released
 *     with their matching *_free function; handles are never shared between
 *     create/free pairs.
 */
#ifndef SPFCAST_H
#define SPFCAST_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum spfcast_status {
    SPFCAST_OK = 0,
    SPFCAST_E_INVALID_ARGUMENT,
    SPFCAST_E_DOMAIN,
    SPFCAST_E_UNSUPPORTED,
    SPFCAST_E_MISSING_VINTAGE,
    SPFCAST_E_NO_DATA_YET,
    SPFCAST_E_PENDING_OBSERVATION,
    SPFCAST_E_INSUFFICIENT_PANEL,
    SPFCAST_E_INSUFFICIENT_HISTORY,
    SPFCAST_E_INSUFFICIENT_DATA,
    SPFCAST_E_INSUFFICIENT_TRAINING,
    SPFCAST_E_FIT_FAILURE,
    SPFCAST_E_ALIGNMENT,
    SPFCAST_E_EMPTY_PERIOD,
    SPFCAST_E_PARSE,
    SPFCAST_E_CONFIG,
    SPFCAST_E_IO,
    SPFCAST_E_INTERNAL
} spfcast_status;

const char* spfcast_version(void);
const char* spfcast_status_name(int status);
/* Message from the most recent failing call on this thread; empty otherwise. */
const char* spfcast_last_error(void);
/* Releases strings returned through char** out-parameters. */
void spfcast_free(char* ptr);

/* --- predictive distributions ------------------------------------------- */

typedef struct spfcast_dist spfcast_dist;

int spfcast_dist_gaussian(double mu, double sigma, spfcast_dist** out);
int spfcast_dist_two_piece_normal(double mu, double sigma1, double sigma2,
                                  spfcast_dist** out);
int spfcast_dist_mixture(double alpha, double mu1, double sigma1, double mu2, double sigma2,
                         spfcast_dist** out);
int spfcast_dist_ensemble(const double* members, size_t count, spfcast_dist** out);
void spfcast_dist_free(spfcast_dist* dist);

int spfcast_dist_cdf(const spfcast_dist* dist, double y, double* out);
int spfcast_dist_pdf(const spfcast_dist* dist, double y, double* out);
int spfcast_dist_quantile(const spfcast_dist* dist, double p, double* out);

/* Closed-form CRPS for the handle's variant. */
int spfcast_crps(const spfcast_dist* dist, double y, double* out);
/* Direct numerical integration of the CRPS definition (the oracle). */
int spfcast_crps_numeric(const spfcast_dist* dist, double y, double* out);

/* --- scoring -------------------------------------------------------------- */

/* Diebold-Mariano test on aligned loss series of length count at `horizon`.
 * On a non-positive long-run variance estimate the statistic and tail
 * probability are NaN, code is "NA" and *reject_by_convention is 1. */
int spfcast_dm_test(const double* loss_a, const double* loss_b, size_t count, int horizon,
                    double* statistic, double* lower_tail_prob, char code[3],
                    int* reject_by_convention);

/* "00" iff p <= 0.01, "99" iff p > 0.99, otherwise floor(100p). */
int spfcast_encode_tail_probability(double p, char code[3]);

/* --- data stores ------------------------------------------------------------ */

typedef struct spfcast_store spfcast_store;

/* Parse + validate the canonical CSVs (cpi_vintages.csv / spf_panel.csv). */
int spfcast_store_open_csv(const char* cpi_csv_path, const char* spf_csv_path,
                           spfcast_store** out);
/* Open a directory previously written by spfcast_ingest. */
int spfcast_store_open(const char* store_dir, spfcast_store** out);
void spfcast_store_free(spfcast_store* store);

/* Validate the two CSVs and write a normalized store directory. */
int spfcast_ingest(const char* cpi_csv_path, const char* spf_csv_path, const char* out_dir);

/* --- engine ------------------------------------------------------------------ */

/* Rolling-origin backtest; config_path NULL means defaults. Writes
 * scores.csv, losses.csv, per-sub-period tables, forecasters.csv (when a
 * forecaster period is configured) and metadata.json into out_dir. */
int spfcast_backtest(const spfcast_store* store, const char* config_path,
                     const char* out_dir);

/* Training-length sweep over comma-separated lengths; writes sweep.csv into
 * out_dir. */
int spfcast_sweep(const spfcast_store* store, const char* config_path, const char* lengths,
                  const char* out_dir);

/* Render the tables of a finished run ("md" or "csv"); *out receives a
 * malloc'd string released with spfcast_free. */
int spfcast_report(const char* run_dir, const char* format, char** out);

/* Fit one postprocessing model ("hr1", "hr2", "gm1", "gm2") at an origin and
 * horizon; *out_json receives the parameters and fit diagnostics. When
 * trace_csv_path is non-NULL the per-iteration objective trace is written
 * there. */
int spfcast_fit(const spfcast_store* store, const char* config_path, const char* origin,
                int horizon, const char* method, const char* trace_csv_path,
                char** out_json);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SPFCAST_H */
