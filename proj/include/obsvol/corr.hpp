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

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace obsvol {

// C_{x,y}(tau) for tau = 0..tau_max, pairing x(t+tau) with y(t).
struct CorrelationCurve {
  std::string label;
  std::vector<int> lags;
  std::vector<double> values;
  std::vector<double> band_low; // empty when no bootstrap band was computed
  std::vector<double> band_high;
  bool truncated = false; // fewer lags than requested, see warning
  bool degenerate = false; // a series had zero variance; values empty
  std::string warning;

  bool has_band() const noexcept { return !band_low.empty(); }
  bool operator==(const CorrelationCurve&) const = default;
};

struct MomentSummary {
  double mean = 0.0;
  double mean_sq = 0.0;
  double mean_abs = 0.0;
  double variance = 0.0;
  std::size_t count = 0;

  bool operator==(const MomentSummary&) const = default;
};

// Plain means over entries with mask != 0 (an empty mask means all valid).
// Needs at least two valid samples.
MomentSummary sample_moments(std::span<const double> x, std::span<const std::uint8_t> mask = {});

enum class Demean {
  full_sample, // means and deviations from the whole valid sample
  per_lag,     // means and deviations from the overlapping pairs at each lag
};

// Lagged correlation
//
//   C(tau) = < (x(t+tau) - <x>) (y(t) - <y>) >_pairs / (sd(x) sd(y))
//
// where the bracket averages over t such that both x(t+tau) and y(t) are
// valid. Requires equal lengths, tau_max < T/2 and non-constant series
// (StatsError otherwise). If some lag has fewer than two valid pairs the
// curve stops before it and `truncated` is set.
CorrelationCurve cross_correlation(std::span<const double> x, std::span<const double> y,
                                   std::span<const std::uint8_t> mask, int tau_max,
                                   Demean demean = Demean::full_sample, std::string label = {});

// Same, with separate validity masks for x and y.
CorrelationCurve cross_correlation(std::span<const double> x, std::span<const std::uint8_t> mask_x,
                                   std::span<const double> y, std::span<const std::uint8_t> mask_y,
                                   int tau_max, Demean demean = Demean::full_sample,
                                   std::string label = {});

// Rescaling constant linking C_{|r|,|r|} to C_{sigma,sigma}:
//
//   k = rho (<s^2> - <s>^2) / (<s^2> - rho <s>^2),   rho = <|w|>^2 / <w^2>
//
// rho = 3/4 for residuals uniform on [-sqrt3, sqrt3].
double compute_k(const MomentSummary& sigma, double abs_omega_sq_ratio = 0.75);

// The alternative denominator 3<s^2>/4 - <s>^2. Negative for realistic
// market moments; only kept as a negative control for the self test.
double compute_k_misprinted(const MomentSummary& sigma, double abs_omega_sq_ratio = 0.75);

struct UniformityReport {
  double ks_statistic = 0.0; // sup |ECDF(|w|) - u/sqrt3| on [0, sqrt3]
  double mean_abs_omega = 0.0;
  double mean_sq_omega = 0.0;
  std::size_t count = 0;
  std::vector<double> bin_edges; // bins + 1 edges spanning [0, sqrt3]
  std::vector<double> density;   // unit area over the bins
  std::size_t overflow = 0;      // |w| beyond sqrt3 (excluded from density)
  bool degenerate = false;       // all |w| identical

  bool operator==(const UniformityReport&) const = default;
};

// Compares |omega| on valid days with the uniform law on [0, sqrt3].
// Needs at least 100 valid samples and 5 bins.
UniformityReport uniformity_test(std::span<const double> omega, std::span<const std::uint8_t> mask,
                                 std::size_t bins = 20);

// One-sample KS distance of `values` against uniform on [0, upper].
double ks_uniform_statistic(std::vector<double> values, double upper);

// Monte Carlo quantile of the KS statistic for n i.i.d. uniform samples.
double ks_null_quantile(std::size_t n, double q, std::size_t replicates, std::uint64_t seed);

struct RescaleReport {
  double k = 0.0;
  std::vector<int> lags;
  std::vector<double> rr_over_k;     // C_{|r|,|r|} / k
  std::vector<double> rs_over_sqrtk; // C_{|r|,sigma} / sqrt k
  std::vector<double> sr_over_sqrtk; // C_{sigma,|r|} / sqrt k
  std::vector<double> ss;            // C_{sigma,sigma}
  double max_discrepancy_rr = 0.0;   // over tau >= 1
  double max_discrepancy_rs = 0.0;
  double max_discrepancy_sr = 0.0;
  double max_discrepancy = 0.0;

  bool operator==(const RescaleReport&) const = default;
};

RescaleReport rescale_check(const CorrelationCurve& c_rr, const CorrelationCurve& c_rs,
                            const CorrelationCurve& c_sr, const CorrelationCurve& c_ss, double k);

struct BootstrapConfig {
  int tau_max = 250;
  std::size_t block_len = 25;
  std::size_t n_boot = 1000;
  std::uint64_t seed = 1;
  Demean demean = Demean::full_sample;
  double level = 0.95;
  unsigned threads = 0; // 0: hardware concurrency
};

struct Bands {
  std::vector<double> low;
  std::vector<double> high;
};

// Null bands for C_{x,y} under independence: y (with its mask) is resampled
// by circular blocks while x stays fixed, and the per-lag quantiles of the
// replicate curves are returned. Replicate i draws from substream i of the
// seed, so the result does not depend on the thread count.
Bands bootstrap_bands(std::span<const double> x, std::span<const double> y,
                      std::span<const std::uint8_t> mask, const BootstrapConfig& cfg);

// Linear-interpolation sample quantile of sorted data.
double sorted_quantile(std::span<const double> sorted, double q);

} // namespace obsvol
