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

#pragma once

#include "obsvol/corr.hpp"
#include "obsvol/index.hpp"
#include "obsvol/panel.hpp"
#include "obsvol/synth.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

namespace obsvol {

inline constexpr const char* kToolVersion = "obsvol 1.0.0";

using KFormula = std::function<double(const MomentSummary&, double)>;

struct AnalyzeOptions {
  std::string weights = "equal"; // equal | price | explicit:<csv>
  MissingPolicy missing = MissingPolicy::intersect;
  int tau_max = 250;
  std::size_t block_len = 25;
  std::size_t n_boot = 1000;
  std::size_t bins = 20;
  std::uint64_t seed = 1;
  Demean demean = Demean::full_sample;
  double abs_omega_sq_ratio = 0.75;
  std::size_t ks_null_replicates = 1000;
  CsvColumns columns;

  // Not serialized. Replaceable so the self test can run a negative control.
  KFormula k_formula = [](const MomentSummary& m, double ratio) { return compute_k(m, ratio); };
};

struct Provenance {
  std::string tool_version = kToolVersion;
  std::string input_path;
  std::string input_sha256;
  nlohmann::json options; // AnalyzeOptions echo

  bool operator==(const Provenance&) const = default;
};

// Exact consequences of r = sigma * omega that every run re-verifies.
struct IdentityCheck {
  double max_product_error = 0.0;   // max |r - sigma omega| over valid days
  double max_abs_omega = 0.0;
  double second_moment_gap = 0.0;   // |<r^2> - <sigma^2 omega^2>|
  bool equal_weight_bound_ok = true; // max |omega| <= sqrt3 (equal weights only)

  bool operator==(const IdentityCheck&) const = default;
};

struct AnalysisReport {
  std::size_t n_stocks = 0;
  std::size_t n_days = 0;
  std::size_t n_valid = 0;
  std::string weights;
  MomentSummary sigma_moments;
  MomentSummary omega_moments;
  double abs_omega_sq_ratio_used = 0.75;
  double abs_omega_sq_ratio_sample = 0.0;
  double k = 0.0;
  std::vector<CorrelationCurve> curves;
  UniformityReport uniformity;
  double ks_null_q99 = 0.0;
  bool uniformity_consistent = false; // KS below the null 99th percentile
  RescaleReport rescale;
  IdentityCheck identities;
  std::vector<std::string> warnings;
  Provenance provenance;

  const CorrelationCurve* curve(const std::string& label) const;
  bool operator==(const AnalysisReport&) const = default;
};

// Labels of the emitted curves, in report order.
const std::vector<std::string>& curve_labels();

// Battery on an already built index series. Throws StatsError when a
// precondition fails (zero volatility variance, too few valid days, lag
// range too long for the sample).
AnalysisReport analyze_series(const IndexSeries& series, std::size_t n_stocks,
                              const AnalyzeOptions& opts);

// Full pipeline in memory: align, returns, weights, battery.
AnalysisReport analyze_panel(const PricePanel& raw, const AnalyzeOptions& opts);

// Reads the CSV, runs the battery and writes report.json, curve_*.csv,
// rescaled.csv and histogram.csv into out_dir. Nothing is written when an
// error is thrown.
AnalysisReport run_analyze(const std::filesystem::path& input, const AnalyzeOptions& opts,
                           const std::filesystem::path& out_dir);

// prices.csv and sigma_true.csv.
void run_synth(const SynthConfig& cfg, const std::filesystem::path& out_dir);

nlohmann::json report_to_json(const AnalysisReport& report);
AnalysisReport report_from_json(const nlohmann::json& j);
nlohmann::json options_to_json(const AnalyzeOptions& opts);

// File stem for a curve label, e.g. "|r|,sigma" -> "absr_sigma".
std::string curve_file_stem(const std::string& label);

std::string sha256_hex(const std::filesystem::path& path);

} // namespace obsvol
