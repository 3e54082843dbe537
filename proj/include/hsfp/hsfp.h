/*
 * hsfp — historical simulation with flexible probabilities.
 *
 * C interface to the asset-allocation pipeline: panel loading, walk-forward
 * backtests (HS-FP / MVO / EW), parameter-mesh sweeps, and the backtest
 * robustness suite (PSR, MinTRL, PBO via CSCV, DSR).
 *
 * All objects are opaque handles created and destroyed by this library.
 * Functions return HSFP_OK on success; on failure they return an error
 * class and leave a human-readable message in hsfp_last_error() (stored
 * per thread). Handles written through out-parameters are only valid when
 * the call returned HSFP_OK.
 */

#ifndef HSFP_H
#define HSFP_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hsfp_status {
    HSFP_OK = 0,
    HSFP_ERR_CONFIG = 1,
    HSFP_ERR_DATA = 2,
    HSFP_ERR_NUMERIC = 3
} hsfp_status;

typedef enum hsfp_model {
    HSFP_MODEL_HSFP = 0,
    HSFP_MODEL_MVO = 1,
    HSFP_MODEL_EW = 2
} hsfp_model;

typedef enum hsfp_combination {
    HSFP_COMBINE_EQ = 0,
    HSFP_COMBINE_DCC = 1
} hsfp_combination;

typedef struct hsfp_panel hsfp_panel;
typedef struct hsfp_backtest hsfp_backtest;
typedef struct hsfp_trials hsfp_trials;
typedef struct hsfp_audit hsfp_audit;

const char* hsfp_version(void);

/* Message for the most recent failure on this thread; empty string if none. */
const char* hsfp_last_error(void);

/* ---- panels ------------------------------------------------------- */

/* CSV: header row, first column `date` (ISO-8601), numeric columns;
 * empty cells mark gaps to be filled by quarterly interpolation. */
hsfp_status hsfp_panel_load_csv(const char* path, hsfp_panel** out);
hsfp_status hsfp_panel_write_csv(const hsfp_panel* panel, const char* path);
size_t hsfp_panel_rows(const hsfp_panel* panel);
size_t hsfp_panel_cols(const hsfp_panel* panel);
const char* hsfp_panel_column_name(const hsfp_panel* panel, size_t index);
void hsfp_panel_free(hsfp_panel* panel);

/* ---- backtest ------------------------------------------------------ */

/* How one signal column becomes a state variable. Non-positive half-lives
 * fall back to the run-level values. */
typedef struct hsfp_signal_spec {
    const char* name;
    int quarterly;
    int lag_months;
    double fast_half_life;
    double slow_half_life;
} hsfp_signal_spec;

typedef struct hsfp_backtest_config {
    int train_months;       /* initial training window, default 60 */
    int rebalance_months;   /* default 6 */
    double tc_bps;          /* cost per unit turnover, basis points */
    double leeway;          /* crisp band mass, default 0.1 */
    double prior_half_life; /* months, default 60 */
    double fast_half_life;  /* months, default 3 */
    double slow_half_life;  /* months, default 12 */
    int combination;        /* hsfp_combination, default DCC */
    int model;              /* hsfp_model, default HSFP */
    double risk_free_rate;  /* annual, default 0.0725 */
    int frontier_points;    /* default 100 */
    uint64_t seed;          /* recorded in outputs */
} hsfp_backtest_config;

void hsfp_backtest_config_init(hsfp_backtest_config* cfg);

hsfp_status hsfp_backtest_run(const hsfp_panel* prices, const hsfp_panel* signals,
                              const hsfp_signal_spec* specs, size_t n_specs,
                              const hsfp_backtest_config* cfg, hsfp_backtest** out);

size_t hsfp_backtest_months(const hsfp_backtest* bt);

/* Copies up to `capacity` values; returns the series length. Either
 * destination may be NULL. */
size_t hsfp_backtest_returns(const hsfp_backtest* bt, double* gross, double* net,
                             size_t capacity);

/* Keys: ann_return_log, ann_return_geometric, ann_volatility, sharpe,
 * max_drawdown, cvar_95, avg_monthly_turnover. */
hsfp_status hsfp_backtest_stat(const hsfp_backtest* bt, const char* key, double* out);

/* returns.csv, weights.csv and (HS-FP) probabilities.csv + ensemble.json. */
hsfp_status hsfp_backtest_write_outputs(const hsfp_backtest* bt, const char* dir);

/* stats.json for all listed runs plus relative.csv of the first run's
 * rolling 12-month net return against each of the others. */
hsfp_status hsfp_report_write(const hsfp_backtest* const* bts, size_t n, const char* dir);

void hsfp_backtest_free(hsfp_backtest* bt);

/* ---- sweep --------------------------------------------------------- */

typedef struct hsfp_mesh_spec {
    const double* leeway;
    size_t n_leeway;
    const int* rebalance_months;
    size_t n_rebalance;
    const double* prior_half_life;
    size_t n_prior;
    const double* fast_half_life;
    size_t n_fast;
    const double* slow_half_life;
    size_t n_slow;
} hsfp_mesh_spec;

/* Number of configurations the mesh declares (the Cartesian product). */
size_t hsfp_mesh_size(const hsfp_mesh_spec* mesh);

hsfp_status hsfp_sweep_run(const hsfp_panel* prices, const hsfp_panel* signals,
                           const hsfp_signal_spec* specs, size_t n_specs,
                           const hsfp_backtest_config* base, const hsfp_mesh_spec* mesh,
                           int workers, hsfp_trials** out);

/* ---- trial matrices ------------------------------------------------ */

hsfp_status hsfp_trials_write(const hsfp_trials* trials, const char* csv_path,
                              const char* sidecar_json_path);
/* sidecar_json_path may be NULL. */
hsfp_status hsfp_trials_load(const char* csv_path, const char* sidecar_json_path,
                             hsfp_trials** out);
size_t hsfp_trials_rows(const hsfp_trials* trials);
size_t hsfp_trials_cols(const hsfp_trials* trials);
/* Copies up to `capacity` values of one column; returns the row count. */
size_t hsfp_trials_column(const hsfp_trials* trials, size_t index, double* out,
                          size_t capacity);
void hsfp_trials_free(hsfp_trials* trials);

/* ---- robustness ----------------------------------------------------- */

typedef struct hsfp_audit_params {
    int partitions;        /* CSCV blocks, even, default 16 */
    double sr_threshold;   /* probability-of-loss threshold, default 0 */
    double confidence;     /* MinTRL confidence, default 0.95 */
    const char* observed_column; /* NULL: best full-sample Sharpe */
    const char* psr_columns;     /* comma list; NULL: all when N <= 16 */
    uint64_t seed;
} hsfp_audit_params;

void hsfp_audit_params_init(hsfp_audit_params* params);

hsfp_status hsfp_audit_run(const hsfp_trials* trials, const hsfp_audit_params* params,
                           hsfp_audit** out);

/* Keys: pbo, prob_loss, degradation_slope, degradation_intercept, dsr,
 * k_clusters, sr_star, observed_sr, logit_count. */
hsfp_status hsfp_audit_stat(const hsfp_audit* audit, const char* key, double* out);

/* overfit.json, logits.csv, degradation.csv, dominance.csv. */
hsfp_status hsfp_audit_write(const hsfp_audit* audit, const char* dir);

void hsfp_audit_free(hsfp_audit* audit);

/* Probabilistic Sharpe ratio and minimum track record length; Sharpe
 * inputs are per-period, kurtosis is raw (3 under normality). MinTRL is
 * +infinity when the observed Sharpe does not exceed the benchmark. */
hsfp_status hsfp_psr(double sr_observed, double sr_benchmark, double t_observations,
                     double skew, double kurtosis, double* out);
hsfp_status hsfp_min_trl(double sr_observed, double sr_benchmark, double skew,
                         double kurtosis, double confidence, double* out);

#ifdef __cplusplus
}
#endif

#endif /* HSFP_H */
