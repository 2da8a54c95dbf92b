/*
  Copyright 2026 The obsvol Authors

  Licensed under the Apache License, Version 2.0 (the "License");
  you may not use this file except in compliance with the License.
  You may obtain a copy of the License at

  http://www.apache.org/licenses/LICENSE-2.0

  Unless required by applicable law or agreed to in writing, software
  distributed under the License is distributed on an "AS IS" BASIS,
  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
  See the License for the specific language governing permissions and
  limitations under the License.
*/

#ifndef OBSVOL_OBSVOL_H
#define OBSVOL_OBSVOL_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(OBSVOL_BUILDING)
#    define OBSVOL_API __declspec(dllexport)
#  else
#    define OBSVOL_API __declspec(dllimport)
#  endif
#else
#  define OBSVOL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes double as process exit codes for the command-line tool. */
typedef enum ovol_status {
  OVOL_OK = 0,
  OVOL_SELFTEST_FAILED = 1,
  OVOL_INPUT_ERROR = 2,     /* unreadable or malformed input, bad option */
  OVOL_STATS_ERROR = 3,     /* statistical precondition not met */
  OVOL_INTERNAL_ERROR = 4
} ovol_status;

typedef struct ovol_synth_config ovol_synth_config;
typedef struct ovol_analyze_options ovol_analyze_options;
typedef struct ovol_report ovol_report;

OBSVOL_API const char* ovol_version(void);

/* Message for the last failing call on this thread ("" if none). */
OBSVOL_API const char* ovol_last_error(void);

/* Strings returned through char** out-parameters are released with this. */
OBSVOL_API void ovol_string_free(char* s);

/* ---- synthetic market ---------------------------------------------------- */

OBSVOL_API ovol_synth_config* ovol_synth_config_new(void);
OBSVOL_API void ovol_synth_config_free(ovol_synth_config* cfg);
OBSVOL_API ovol_status ovol_synth_config_set_n_stocks(ovol_synth_config* cfg, uint64_t n);
OBSVOL_API ovol_status ovol_synth_config_set_n_days(ovol_synth_config* cfg, uint64_t n);
/* "lognormal-ar1" or "constant" */
OBSVOL_API ovol_status ovol_synth_config_set_vol_model(ovol_synth_config* cfg, const char* model);
OBSVOL_API ovol_status ovol_synth_config_set_vol_level(ovol_synth_config* cfg, double level);
OBSVOL_API ovol_status ovol_synth_config_set_phi(ovol_synth_config* cfg, double phi);
OBSVOL_API ovol_status ovol_synth_config_set_vol_scale(ovol_synth_config* cfg, double scale);
/* "uniform" or "gaussian" */
OBSVOL_API ovol_status ovol_synth_config_set_residual(ovol_synth_config* cfg, const char* model);
/* "market" or "independent" */
OBSVOL_API ovol_status ovol_synth_config_set_coupling(ovol_synth_config* cfg, const char* coupling);
OBSVOL_API ovol_status ovol_synth_config_set_idio_scale(ovol_synth_config* cfg, double scale);
OBSVOL_API ovol_status ovol_synth_config_set_seed(ovol_synth_config* cfg, uint64_t seed);

/* Validates the configuration and writes prices.csv and sigma_true.csv. */
OBSVOL_API ovol_status ovol_synth_write(const ovol_synth_config* cfg, const char* out_dir);

/* ---- analysis ------------------------------------------------------------- */

OBSVOL_API ovol_analyze_options* ovol_analyze_options_new(void);
OBSVOL_API void ovol_analyze_options_free(ovol_analyze_options* opts);
/* "equal", "price" or "explicit:<path to date,ticker,weight csv>" */
OBSVOL_API ovol_status ovol_analyze_options_set_weights(ovol_analyze_options* opts, const char* scheme);
/* "intersect" or "ffill" */
OBSVOL_API ovol_status ovol_analyze_options_set_missing(ovol_analyze_options* opts, const char* policy);
OBSVOL_API ovol_status ovol_analyze_options_set_tau_max(ovol_analyze_options* opts, int64_t tau_max);
OBSVOL_API ovol_status ovol_analyze_options_set_block_len(ovol_analyze_options* opts, uint64_t len);
OBSVOL_API ovol_status ovol_analyze_options_set_n_boot(ovol_analyze_options* opts, uint64_t n);
OBSVOL_API ovol_status ovol_analyze_options_set_bins(ovol_analyze_options* opts, uint64_t bins);
OBSVOL_API ovol_status ovol_analyze_options_set_seed(ovol_analyze_options* opts, uint64_t seed);
/* Input column names; NULL keeps the default (date, ticker, close). */
OBSVOL_API ovol_status ovol_analyze_options_set_columns(ovol_analyze_options* opts, const char* date,
                                                        const char* ticker, const char* close);
OBSVOL_API ovol_status ovol_analyze_options_set_per_lag_demean(ovol_analyze_options* opts, int enabled);

/* Runs the pipeline on a price CSV and writes the report files into out_dir.
   On success *out receives a report handle (may be NULL if not wanted). */
OBSVOL_API ovol_status ovol_analyze_file(const ovol_analyze_options* opts, const char* input_csv,
                                         const char* out_dir, ovol_report** out);

OBSVOL_API void ovol_report_free(ovol_report* report);
OBSVOL_API double ovol_report_k(const ovol_report* report);
OBSVOL_API double ovol_report_ks_statistic(const ovol_report* report);
OBSVOL_API uint64_t ovol_report_n_valid(const ovol_report* report);
/* Values of one curve by label, e.g. "sigma,sigma". Returns the number of
   lags (0 if unknown); copies at most `cap` values into `values`. */
OBSVOL_API size_t ovol_report_curve(const ovol_report* report, const char* label, double* values,
                                    size_t cap);
/* Full report as JSON text. */
OBSVOL_API ovol_status ovol_report_json(const ovol_report* report, char** json);

/* ---- moments --------------------------------------------------------------- */

/* Rescaling constant from volatility moments <s^2>, <s> and the residual
   ratio <|w|>^2/<w^2> (0.75 for uniform residuals). */
OBSVOL_API ovol_status ovol_compute_k(double mean_sq, double mean, double ratio, double* k);

/* ---- self test ------------------------------------------------------------- */

/* full = 0 runs the reduced-scale pipeline. *summary (optional) receives a
   one-line-per-check report. Returns OVOL_SELFTEST_FAILED if any check fails. */
OBSVOL_API ovol_status ovol_selftest(int full, uint64_t seed, char** summary);

#ifdef __cplusplus
}
#endif

#endif /* OBSVOL_OBSVOL_H */
