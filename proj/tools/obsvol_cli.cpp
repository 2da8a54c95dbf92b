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

// obsvol command-line tool: analyze, synth, selftest. Talks to the library
// only through the C API.

#include "obsvol/obsvol.h"

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

namespace {

int report_failure(ovol_status status) {
  std::cerr << "obsvol: " << ovol_last_error() << '\n';
  return static_cast<int>(status);
}

#define OVOL_TRY(call)                                  \
  do {                                                  \
    const ovol_status st_ = (call);                     \
    if (st_ != OVOL_OK) return report_failure(st_);     \
  } while (0)

struct AnalyzeArgs {
  std::string input;
  std::string weights = "equal";
  std::string missing = "intersect";
  std::string date_col = "date", ticker_col = "ticker", close_col = "close";
  int64_t tau_max = 250;
  uint64_t block_len = 25;
  uint64_t n_boot = 1000;
  uint64_t bins = 20;
  bool per_lag = false;
};

struct SynthArgs {
  uint64_t n_stocks = 65;
  uint64_t n_days = 10000;
  std::string vol_model = "lognormal-ar1";
  double vol_level = 0.015;
  double phi = 0.98;
  double vol_scale = 0.1;
  std::string residual = "uniform";
  std::string coupling = "market";
  double idio_scale = 0.0;
};

int run_analyze(const AnalyzeArgs& a, uint64_t seed, const std::string& out) {
  ovol_analyze_options* opts = ovol_analyze_options_new();
  if (opts == nullptr) return OVOL_INTERNAL_ERROR;
  ovol_report* report = nullptr;
  const int rc = [&]() -> int {
    OVOL_TRY(ovol_analyze_options_set_weights(opts, a.weights.c_str()));
    OVOL_TRY(ovol_analyze_options_set_missing(opts, a.missing.c_str()));
    OVOL_TRY(ovol_analyze_options_set_tau_max(opts, a.tau_max));
    OVOL_TRY(ovol_analyze_options_set_block_len(opts, a.block_len));
    OVOL_TRY(ovol_analyze_options_set_n_boot(opts, a.n_boot));
    OVOL_TRY(ovol_analyze_options_set_bins(opts, a.bins));
    OVOL_TRY(ovol_analyze_options_set_seed(opts, seed));
    OVOL_TRY(ovol_analyze_options_set_columns(opts, a.date_col.c_str(), a.ticker_col.c_str(),
                                              a.close_col.c_str()));
    OVOL_TRY(ovol_analyze_options_set_per_lag_demean(opts, a.per_lag ? 1 : 0));
    OVOL_TRY(ovol_analyze_file(opts, a.input.c_str(), out.c_str(), &report));
    std::vector<double> ss(static_cast<std::size_t>(a.tau_max) + 1);
    const std::size_t n = ovol_report_curve(report, "sigma,sigma", ss.data(), ss.size());
    std::printf("valid days      %llu\n", static_cast<unsigned long long>(ovol_report_n_valid(report)));
    std::printf("k               %.6f  (1/k = %.4f)\n", ovol_report_k(report), 1.0 / ovol_report_k(report));
    std::printf("KS |omega|      %.6f\n", ovol_report_ks_statistic(report));
    if (n > 1) std::printf("C_sigma,sigma(1) %.6f\n", ss[1]);
    std::printf("report written to %s/report.json\n", out.c_str());
    return 0;
  }();
  ovol_report_free(report);
  ovol_analyze_options_free(opts);
  return rc;
}

int run_synth(const SynthArgs& a, uint64_t seed, const std::string& out) {
  ovol_synth_config* cfg = ovol_synth_config_new();
  if (cfg == nullptr) return OVOL_INTERNAL_ERROR;
  const int rc = [&]() -> int {
    OVOL_TRY(ovol_synth_config_set_n_stocks(cfg, a.n_stocks));
    OVOL_TRY(ovol_synth_config_set_n_days(cfg, a.n_days));
    OVOL_TRY(ovol_synth_config_set_vol_model(cfg, a.vol_model.c_str()));
    OVOL_TRY(ovol_synth_config_set_vol_level(cfg, a.vol_level));
    OVOL_TRY(ovol_synth_config_set_phi(cfg, a.phi));
    OVOL_TRY(ovol_synth_config_set_vol_scale(cfg, a.vol_scale));
    OVOL_TRY(ovol_synth_config_set_residual(cfg, a.residual.c_str()));
    OVOL_TRY(ovol_synth_config_set_coupling(cfg, a.coupling.c_str()));
    OVOL_TRY(ovol_synth_config_set_idio_scale(cfg, a.idio_scale));
    OVOL_TRY(ovol_synth_config_set_seed(cfg, seed));
    OVOL_TRY(ovol_synth_write(cfg, out.c_str()));
    std::printf("wrote %s/prices.csv and %s/sigma_true.csv\n", out.c_str(), out.c_str());
    return 0;
  }();
  ovol_synth_config_free(cfg);
  return rc;
}

int run_selftest(bool full, uint64_t seed) {
  char* summary = nullptr;
  const ovol_status st = ovol_selftest(full ? 1 : 0, seed, &summary);
  if (summary != nullptr) {
    std::fputs(summary, stdout);
    ovol_string_free(summary);
  }
  if (st != OVOL_OK && st != OVOL_SELFTEST_FAILED) return report_failure(st);
  return static_cast<int>(st);
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Observable market volatility: estimator, verification battery, synthetic oracle"};
  app.set_version_flag("--version", std::string(ovol_version()));
  app.require_subcommand(1);

  uint64_t seed = 1;
  std::string out = "out";

  auto* analyze = app.add_subcommand("analyze", "Estimate volatility from a price panel and run the battery");
  AnalyzeArgs aa;
  analyze->add_option("--input", aa.input, "Long-format price CSV (date,ticker,close)")->required();
  analyze->add_option("--weights", aa.weights, "equal | price | explicit:<csv>");
  analyze->add_option("--missing", aa.missing, "intersect | ffill");
  analyze->add_option("--tau-max", aa.tau_max, "Largest lag in days");
  analyze->add_option("--block-len", aa.block_len, "Bootstrap block length in days");
  analyze->add_option("--n-boot", aa.n_boot, "Bootstrap replicates (0 disables bands)");
  analyze->add_option("--bins", aa.bins, "Histogram bins for |omega|");
  analyze->add_option("--date-col", aa.date_col, "Date column name");
  analyze->add_option("--ticker-col", aa.ticker_col, "Ticker column name");
  analyze->add_option("--close-col", aa.close_col, "Close column name");
  analyze->add_flag("--per-lag-demean", aa.per_lag, "Demean over the overlapping pairs at each lag");
  analyze->add_option("--seed", seed, "Seed for all resampling");
  analyze->add_option("--out", out, "Output directory");

  auto* synth = app.add_subcommand("synth", "Write a synthetic price panel with known volatility");
  SynthArgs sa;
  synth->add_option("--n-stocks", sa.n_stocks, "Number of stocks");
  synth->add_option("--n-days", sa.n_days, "Number of daily returns (>= 2)");
  synth->add_option("--vol-model", sa.vol_model, "lognormal-ar1 | constant");
  synth->add_option("--vol-level", sa.vol_level, "exp(mean of ln sigma), or the constant level");
  synth->add_option("--phi", sa.phi, "AR(1) persistence of ln sigma");
  synth->add_option("--vol-scale", sa.vol_scale, "Innovation sd of ln sigma");
  synth->add_option("--residual", sa.residual, "uniform | gaussian");
  synth->add_option("--coupling", sa.coupling, "market | independent");
  synth->add_option("--idio-scale", sa.idio_scale, "Log-sd of per-stock dispersion factors");
  synth->add_option("--seed", seed, "Generator seed");
  synth->add_option("--out", out, "Output directory");

  auto* selftest = app.add_subcommand("selftest", "Run the synthetic end-to-end oracle checks");
  bool full = false, quick = false;
  uint64_t selftest_seed = 7; // same default as the library entry point
  selftest->add_flag("--full", full, "Full scale (T = 10000, 1000 replicates)");
  selftest->add_flag("--quick", quick, "Reduced scale (default)");
  selftest->add_option("--seed", selftest_seed, "Seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return OVOL_INPUT_ERROR;
  }

  if (*analyze) return run_analyze(aa, seed, out);
  if (*synth) return run_synth(sa, seed, out);
  if (quick && full) {
    std::cerr << "obsvol: --quick and --full are exclusive\n";
    return OVOL_INPUT_ERROR;
  }
  return run_selftest(full, selftest_seed);
}
