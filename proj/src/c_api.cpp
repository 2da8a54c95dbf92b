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

#include "obsvol/obsvol.h"

#include "obsvol/error.hpp"
#include "obsvol/report.hpp"
#include "obsvol/selftest.hpp"

#include <cstdlib>
#include <cstring>
#include <string>

struct ovol_synth_config {
  obsvol::SynthConfig cfg;
};

struct ovol_analyze_options {
  obsvol::AnalyzeOptions opts;
};

struct ovol_report {
  obsvol::AnalysisReport report;
};

namespace {

thread_local std::string last_error;

ovol_status fail(ovol_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

// Runs `fn`, translating exceptions into status codes.
template <typename Fn>
ovol_status guarded(Fn&& fn) {
  try {
    last_error.clear();
    return fn();
  } catch (const obsvol::InputError& e) {
    return fail(OVOL_INPUT_ERROR, e.what());
  } catch (const obsvol::StatsError& e) {
    return fail(OVOL_STATS_ERROR, e.what());
  } catch (const std::exception& e) {
    return fail(OVOL_INTERNAL_ERROR, e.what());
  } catch (...) {
    return fail(OVOL_INTERNAL_ERROR, "unknown error");
  }
}

char* dup_string(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out != nullptr) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

#define OVOL_REQUIRE(ptr)                                                    \
  do {                                                                       \
    if ((ptr) == nullptr) return fail(OVOL_INPUT_ERROR, #ptr " is NULL");    \
  } while (0)

} // namespace

extern "C" {

const char* ovol_version(void) { return obsvol::kToolVersion; }

const char* ovol_last_error(void) { return last_error.c_str(); }

void ovol_string_free(char* s) { std::free(s); }

ovol_synth_config* ovol_synth_config_new(void) { return new (std::nothrow) ovol_synth_config{}; }

void ovol_synth_config_free(ovol_synth_config* cfg) { delete cfg; }

ovol_status ovol_synth_config_set_n_stocks(ovol_synth_config* cfg, uint64_t n) {
  OVOL_REQUIRE(cfg);
  cfg->cfg.n_stocks = n;
  return OVOL_OK;
}

ovol_status ovol_synth_config_set_n_days(ovol_synth_config* cfg, uint64_t n) {
  OVOL_REQUIRE(cfg);
  cfg->cfg.n_days = n;
  return OVOL_OK;
}

ovol_status ovol_synth_config_set_vol_model(ovol_synth_config* cfg, const char* model) {
  OVOL_REQUIRE(cfg);
  OVOL_REQUIRE(model);
  return guarded([&] {
    cfg->cfg.vol_model = obsvol::parse_vol_model(model);
    return OVOL_OK;
  });
}

ovol_status ovol_synth_config_set_vol_level(ovol_synth_config* cfg, double level) {
  OVOL_REQUIRE(cfg);
  cfg->cfg.vol_level = level;
  return OVOL_OK;
}

ovol_status ovol_synth_config_set_phi(ovol_synth_config* cfg, double phi) {
  OVOL_REQUIRE(cfg);
  cfg->cfg.phi = phi;
  return OVOL_OK;
}

ovol_status ovol_synth_config_set_vol_scale(ovol_synth_config* cfg, double scale) {
  OVOL_REQUIRE(cfg);
  cfg->cfg.vol_scale = scale;
  return OVOL_OK;
}

ovol_status ovol_synth_config_set_residual(ovol_synth_config* cfg, const char* model) {
  OVOL_REQUIRE(cfg);
  OVOL_REQUIRE(model);
  return guarded([&] {
    cfg->cfg.residual = obsvol::parse_residual_model(model);
    return OVOL_OK;
  });
}

ovol_status ovol_synth_config_set_coupling(ovol_synth_config* cfg, const char* coupling) {
  OVOL_REQUIRE(cfg);
  OVOL_REQUIRE(coupling);
  return guarded([&] {
    cfg->cfg.coupling = obsvol::parse_coupling(coupling);
    return OVOL_OK;
  });
}

ovol_status ovol_synth_config_set_idio_scale(ovol_synth_config* cfg, double scale) {
  OVOL_REQUIRE(cfg);
  cfg->cfg.idio_scale = scale;
  return OVOL_OK;
}

ovol_status ovol_synth_config_set_seed(ovol_synth_config* cfg, uint64_t seed) {
  OVOL_REQUIRE(cfg);
  cfg->cfg.seed = seed;
  return OVOL_OK;
}

ovol_status ovol_synth_write(const ovol_synth_config* cfg, const char* out_dir) {
  OVOL_REQUIRE(cfg);
  OVOL_REQUIRE(out_dir);
  return guarded([&] {
    obsvol::run_synth(cfg->cfg, out_dir);
    return OVOL_OK;
  });
}

ovol_analyze_options* ovol_analyze_options_new(void) {
  return new (std::nothrow) ovol_analyze_options{};
}

void ovol_analyze_options_free(ovol_analyze_options* opts) { delete opts; }

ovol_status ovol_analyze_options_set_weights(ovol_analyze_options* opts, const char* scheme) {
  OVOL_REQUIRE(opts);
  OVOL_REQUIRE(scheme);
  const std::string s = scheme;
  if (s != "equal" && s != "price" && !(s.starts_with("explicit:") && s.size() > 9)) {
    return fail(OVOL_INPUT_ERROR, "unknown weight scheme '" + s + "' (equal|price|explicit:<csv>)");
  }
  opts->opts.weights = s;
  return OVOL_OK;
}

ovol_status ovol_analyze_options_set_missing(ovol_analyze_options* opts, const char* policy) {
  OVOL_REQUIRE(opts);
  OVOL_REQUIRE(policy);
  return guarded([&] {
    opts->opts.missing = obsvol::parse_missing_policy(policy);
    return OVOL_OK;
  });
}

ovol_status ovol_analyze_options_set_tau_max(ovol_analyze_options* opts, int64_t tau_max) {
  OVOL_REQUIRE(opts);
  if (tau_max < 0 || tau_max > 1'000'000) return fail(OVOL_INPUT_ERROR, "tau_max out of range");
  opts->opts.tau_max = static_cast<int>(tau_max);
  return OVOL_OK;
}

ovol_status ovol_analyze_options_set_block_len(ovol_analyze_options* opts, uint64_t len) {
  OVOL_REQUIRE(opts);
  if (len < 1) return fail(OVOL_INPUT_ERROR, "block length must be at least 1");
  opts->opts.block_len = len;
  return OVOL_OK;
}

ovol_status ovol_analyze_options_set_n_boot(ovol_analyze_options* opts, uint64_t n) {
  OVOL_REQUIRE(opts);
  if (n != 0 && n < 100) {
    return fail(OVOL_INPUT_ERROR, "n_boot must be 0 (no bands) or at least 100");
  }
  opts->opts.n_boot = n;
  return OVOL_OK;
}

ovol_status ovol_analyze_options_set_bins(ovol_analyze_options* opts, uint64_t bins) {
  OVOL_REQUIRE(opts);
  if (bins < 5) return fail(OVOL_INPUT_ERROR, "bins must be at least 5");
  opts->opts.bins = bins;
  return OVOL_OK;
}

ovol_status ovol_analyze_options_set_seed(ovol_analyze_options* opts, uint64_t seed) {
  OVOL_REQUIRE(opts);
  opts->opts.seed = seed;
  return OVOL_OK;
}

ovol_status ovol_analyze_options_set_columns(ovol_analyze_options* opts, const char* date,
                                             const char* ticker, const char* close) {
  OVOL_REQUIRE(opts);
  if (date != nullptr) opts->opts.columns.date = date;
  if (ticker != nullptr) opts->opts.columns.ticker = ticker;
  if (close != nullptr) opts->opts.columns.close = close;
  return OVOL_OK;
}

ovol_status ovol_analyze_options_set_per_lag_demean(ovol_analyze_options* opts, int enabled) {
  OVOL_REQUIRE(opts);
  opts->opts.demean = enabled ? obsvol::Demean::per_lag : obsvol::Demean::full_sample;
  return OVOL_OK;
}

ovol_status ovol_analyze_file(const ovol_analyze_options* opts, const char* input_csv,
                              const char* out_dir, ovol_report** out) {
  OVOL_REQUIRE(opts);
  OVOL_REQUIRE(input_csv);
  OVOL_REQUIRE(out_dir);
  if (out != nullptr) *out = nullptr;
  return guarded([&] {
    auto report = obsvol::run_analyze(input_csv, opts->opts, out_dir);
    if (out != nullptr) *out = new ovol_report{std::move(report)};
    return OVOL_OK;
  });
}

void ovol_report_free(ovol_report* report) { delete report; }

double ovol_report_k(const ovol_report* report) { return report ? report->report.k : 0.0; }

double ovol_report_ks_statistic(const ovol_report* report) {
  return report ? report->report.uniformity.ks_statistic : 0.0;
}

uint64_t ovol_report_n_valid(const ovol_report* report) {
  return report ? report->report.n_valid : 0;
}

size_t ovol_report_curve(const ovol_report* report, const char* label, double* values, size_t cap) {
  if (report == nullptr || label == nullptr) return 0;
  const auto* c = report->report.curve(label);
  if (c == nullptr) return 0;
  const std::size_t n = c->values.size();
  if (values != nullptr) {
    for (std::size_t i = 0; i < n && i < cap; ++i) values[i] = c->values[i];
  }
  return n;
}

ovol_status ovol_report_json(const ovol_report* report, char** json) {
  OVOL_REQUIRE(report);
  OVOL_REQUIRE(json);
  return guarded([&] {
    *json = dup_string(obsvol::report_to_json(report->report).dump(2));
    return *json != nullptr ? OVOL_OK : fail(OVOL_INTERNAL_ERROR, "out of memory");
  });
}

ovol_status ovol_compute_k(double mean_sq, double mean, double ratio, double* k) {
  OVOL_REQUIRE(k);
  return guarded([&] {
    obsvol::MomentSummary m;
    m.mean_sq = mean_sq;
    m.mean = mean;
    *k = obsvol::compute_k(m, ratio);
    return OVOL_OK;
  });
}

ovol_status ovol_selftest(int full, uint64_t seed, char** summary) {
  if (summary != nullptr) *summary = nullptr;
  return guarded([&] {
    const auto result =
        obsvol::run_selftest(full ? obsvol::SelftestMode::full : obsvol::SelftestMode::quick, seed);
    if (summary != nullptr) *summary = dup_string(result.summary());
    if (result.passed()) return OVOL_OK;
    return fail(OVOL_SELFTEST_FAILED, "selftest failed");
  });
}

} // extern "C"
