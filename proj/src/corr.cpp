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

#include "obsvol/corr.hpp"

#include "obsvol/error.hpp"
#include "obsvol/index.hpp"
#include "obsvol/random.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

namespace obsvol {

namespace {

constexpr std::uint64_t kBootstrapStream = 0x626f6f7400000000ULL;
constexpr std::uint64_t kKsNullStream = 0x6b736e0000000000ULL;

// out[tau] = sum_{t < T - tau} a[t + tau] * b[t]
void lagged_dot(std::span<const double> a, std::span<const double> b, int tau_max,
                std::vector<double>& out) {
  const std::size_t n = a.size();
  out.assign(static_cast<std::size_t>(tau_max) + 1, 0.0);
  for (int tau = 0; tau <= tau_max; ++tau) {
    const std::size_t len = n - static_cast<std::size_t>(tau);
    const double* pa = a.data() + tau;
    const double* pb = b.data();
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t t = 0;
    for (; t + 4 <= len; t += 4) {
      s0 += pa[t] * pb[t];
      s1 += pa[t + 1] * pb[t + 1];
      s2 += pa[t + 2] * pb[t + 2];
      s3 += pa[t + 3] * pb[t + 3];
    }
    for (; t < len; ++t) s0 += pa[t] * pb[t];
    out[static_cast<std::size_t>(tau)] = (s0 + s1) + (s2 + s3);
  }
}

// A series centred on its valid-sample mean, zero where invalid.
struct Prepared {
  std::vector<double> centred;
  std::vector<double> mask; // 1.0 / 0.0
  double sd = 0.0;
  double scale = 0.0; // max |x| over valid entries
  std::size_t count = 0;
  bool all_valid = true;
};

Prepared prepare(std::span<const double> x, std::span<const std::uint8_t> mask) {
  Prepared p;
  const std::size_t n = x.size();
  p.mask.resize(n);
  double sum = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const bool ok = mask.empty() || mask[t] != 0;
    p.mask[t] = ok ? 1.0 : 0.0;
    p.all_valid = p.all_valid && ok;
    if (ok) {
      sum += x[t];
      p.scale = std::max(p.scale, std::fabs(x[t]));
      ++p.count;
    }
  }
  if (p.count == 0) return p;
  const double mean = sum / static_cast<double>(p.count);
  p.centred.resize(n);
  double ss = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    p.centred[t] = p.mask[t] != 0.0 ? x[t] - mean : 0.0;
    ss += p.centred[t] * p.centred[t];
  }
  p.sd = std::sqrt(ss / static_cast<double>(p.count));
  return p;
}

struct Scratch {
  std::vector<double> dots, counts, sx, sy, sxx, syy;
};

// Fills `values` with C(0..k) and returns the number of usable lags.
std::size_t correlate(const Prepared& px, const Prepared& py, int tau_max, Demean demean,
                      Scratch& s, std::vector<double>& values) {
  const std::size_t n = px.centred.size();
  const std::size_t lags = static_cast<std::size_t>(tau_max) + 1;
  values.assign(lags, 0.0);
  lagged_dot(px.centred, py.centred, tau_max, s.dots);
  const bool dense = px.all_valid && py.all_valid;
  if (dense) {
    s.counts.resize(lags);
    for (std::size_t tau = 0; tau < lags; ++tau) s.counts[tau] = static_cast<double>(n - tau);
  } else {
    lagged_dot(px.mask, py.mask, tau_max, s.counts);
  }

  if (demean == Demean::per_lag) {
    // Sums of each side over the overlapping pairs.
    lagged_dot(px.centred, py.mask, tau_max, s.sx);
    lagged_dot(px.mask, py.centred, tau_max, s.sy);
    std::vector<double> xsq(n), ysq(n);
    for (std::size_t t = 0; t < n; ++t) {
      xsq[t] = px.centred[t] * px.centred[t];
      ysq[t] = py.centred[t] * py.centred[t];
    }
    lagged_dot(xsq, py.mask, tau_max, s.sxx);
    lagged_dot(px.mask, ysq, tau_max, s.syy);
  }

  for (std::size_t tau = 0; tau < lags; ++tau) {
    const double c = s.counts[tau];
    if (c < 2.0) return tau;
    if (demean == Demean::full_sample) {
      values[tau] = s.dots[tau] / c / (px.sd * py.sd);
    } else {
      const double mx = s.sx[tau] / c, my = s.sy[tau] / c;
      const double vx = s.sxx[tau] / c - mx * mx, vy = s.syy[tau] / c - my * my;
      if (!(vx > 0.0) || !(vy > 0.0)) return tau;
      values[tau] = (s.dots[tau] / c - mx * my) / std::sqrt(vx * vy);
    }
  }
  return lags;
}

void check_lengths(std::size_t nx, std::size_t mx, std::size_t ny, std::size_t my) {
  if (nx != ny) {
    throw InputError("series lengths differ (" + std::to_string(nx) + " vs " +
                     std::to_string(ny) + ")");
  }
  if ((mx != 0 && mx != nx) || (my != 0 && my != ny)) {
    throw InputError("mask length does not match series length");
  }
}

void check_tau(int tau_max, std::size_t n) {
  if (tau_max < 0) throw InputError("tau_max must be non-negative");
  if (2 * static_cast<std::size_t>(tau_max) >= n) {
    throw StatsError("tau_max " + std::to_string(tau_max) + " must be below T/2 (T = " +
                     std::to_string(n) + ")");
  }
}

// A spread at rounding level (e.g. |r|/sigma for a single stock) counts as
// constant.
bool degenerate(const Prepared& p) { return p.count < 2 || !(p.sd > 1e-12 * p.scale); }

void require_variance(const Prepared& p, const char* which) {
  if (degenerate(p)) {
    throw StatsError(std::string("zero variance in ") + which);
  }
}

} // namespace

MomentSummary sample_moments(std::span<const double> x, std::span<const std::uint8_t> mask) {
  if (!mask.empty() && mask.size() != x.size()) {
    throw InputError("mask length does not match series length");
  }
  MomentSummary m;
  double sum = 0.0, sum_sq = 0.0, sum_abs = 0.0;
  for (std::size_t t = 0; t < x.size(); ++t) {
    if (!mask.empty() && mask[t] == 0) continue;
    sum += x[t];
    sum_sq += x[t] * x[t];
    sum_abs += std::fabs(x[t]);
    ++m.count;
  }
  if (m.count < 2) {
    throw StatsError("need at least 2 valid samples, have " + std::to_string(m.count));
  }
  const auto n = static_cast<double>(m.count);
  m.mean = sum / n;
  m.mean_sq = sum_sq / n;
  m.mean_abs = sum_abs / n;
  double ss = 0.0;
  for (std::size_t t = 0; t < x.size(); ++t) {
    if (!mask.empty() && mask[t] == 0) continue;
    ss += (x[t] - m.mean) * (x[t] - m.mean);
  }
  m.variance = ss / n;
  return m;
}

CorrelationCurve cross_correlation(std::span<const double> x, std::span<const std::uint8_t> mask_x,
                                   std::span<const double> y, std::span<const std::uint8_t> mask_y,
                                   int tau_max, Demean demean, std::string label) {
  check_lengths(x.size(), mask_x.size(), y.size(), mask_y.size());
  check_tau(tau_max, x.size());
  const Prepared px = prepare(x, mask_x);
  const Prepared py = prepare(y, mask_y);
  require_variance(px, "x");
  require_variance(py, "y");

  CorrelationCurve curve;
  curve.label = std::move(label);
  Scratch scratch;
  const std::size_t usable = correlate(px, py, tau_max, demean, scratch, curve.values);
  curve.values.resize(usable);
  curve.lags.resize(usable);
  for (std::size_t i = 0; i < usable; ++i) curve.lags[i] = static_cast<int>(i);
  if (usable < static_cast<std::size_t>(tau_max) + 1) {
    curve.truncated = true;
    curve.warning = "truncated at lag " + std::to_string(usable) +
                    ": fewer than 2 valid overlapping pairs";
  }
  return curve;
}

CorrelationCurve cross_correlation(std::span<const double> x, std::span<const double> y,
                                   std::span<const std::uint8_t> mask, int tau_max, Demean demean,
                                   std::string label) {
  return cross_correlation(x, mask, y, mask, tau_max, demean, std::move(label));
}

double compute_k(const MomentSummary& sigma, double ratio) {
  if (!(ratio > 0.0) || ratio > 1.0) throw StatsError("abs/sq residual ratio must lie in (0, 1]");
  const double variance = sigma.mean_sq - sigma.mean * sigma.mean;
  if (!(variance > 0.0)) throw StatsError("volatility has zero variance; k is undefined");
  const double denom = sigma.mean_sq - ratio * sigma.mean * sigma.mean;
  if (!(denom > 0.0)) throw StatsError("non-positive denominator in k");
  return ratio * variance / denom;
}

double compute_k_misprinted(const MomentSummary& sigma, double ratio) {
  const double variance = sigma.mean_sq - sigma.mean * sigma.mean;
  return variance / (ratio * sigma.mean_sq - sigma.mean * sigma.mean);
}

double ks_uniform_statistic(std::vector<double> values, double upper) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const auto n = static_cast<double>(values.size());
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double u = std::clamp(values[i] / upper, 0.0, 1.0);
    const auto fi = static_cast<double>(i);
    d = std::max({d, (fi + 1.0) / n - u, u - fi / n});
  }
  return d;
}

double ks_null_quantile(std::size_t n, double q, std::size_t replicates, std::uint64_t seed) {
  if (n == 0 || replicates == 0) throw InputError("ks_null_quantile: empty calibration");
  std::vector<double> stats(replicates), draws(n);
  for (std::size_t r = 0; r < replicates; ++r) {
    Rng rng(seed, kKsNullStream + r);
    for (auto& v : draws) v = rng.uniform01();
    stats[r] = ks_uniform_statistic(draws, 1.0);
  }
  std::sort(stats.begin(), stats.end());
  return sorted_quantile(stats, q);
}

UniformityReport uniformity_test(std::span<const double> omega, std::span<const std::uint8_t> mask,
                                 std::size_t bins) {
  if (!mask.empty() && mask.size() != omega.size()) {
    throw InputError("mask length does not match series length");
  }
  if (bins < 5) throw InputError("uniformity histogram needs at least 5 bins");
  std::vector<double> a;
  a.reserve(omega.size());
  for (std::size_t t = 0; t < omega.size(); ++t) {
    if (mask.empty() || mask[t] != 0) a.push_back(std::fabs(omega[t]));
  }
  if (a.size() < 100) {
    throw StatsError("uniformity test needs at least 100 valid residuals, have " +
                     std::to_string(a.size()));
  }

  UniformityReport rep;
  rep.count = a.size();
  double s1 = 0.0, s2 = 0.0;
  for (double v : a) {
    s1 += v;
    s2 += v * v;
  }
  rep.mean_abs_omega = s1 / static_cast<double>(a.size());
  rep.mean_sq_omega = s2 / static_cast<double>(a.size());
  const auto [lo, hi] = std::minmax_element(a.begin(), a.end());
  rep.degenerate = *hi - *lo <= 1e-9;

  const double width = kSqrt3 / static_cast<double>(bins);
  rep.bin_edges.resize(bins + 1);
  for (std::size_t b = 0; b <= bins; ++b) rep.bin_edges[b] = width * static_cast<double>(b);
  rep.bin_edges.back() = kSqrt3;
  std::vector<std::size_t> counts(bins, 0);
  for (double v : a) {
    if (v > kSqrt3 * (1.0 + 1e-12)) {
      ++rep.overflow;
      continue;
    }
    const auto b = std::min(static_cast<std::size_t>(v / width), bins - 1);
    ++counts[b];
  }
  const auto inside = static_cast<double>(a.size() - rep.overflow);
  rep.density.resize(bins, 0.0);
  if (inside > 0) {
    for (std::size_t b = 0; b < bins; ++b) {
      rep.density[b] = static_cast<double>(counts[b]) / (inside * width);
    }
  }
  rep.ks_statistic = ks_uniform_statistic(std::move(a), kSqrt3);
  return rep;
}

RescaleReport rescale_check(const CorrelationCurve& c_rr, const CorrelationCurve& c_rs,
                            const CorrelationCurve& c_sr, const CorrelationCurve& c_ss, double k) {
  if (!(k > 0.0) || !std::isfinite(k)) throw StatsError("rescale check needs k > 0");
  if (c_rr.lags != c_ss.lags || c_rs.lags != c_ss.lags || c_sr.lags != c_ss.lags) {
    throw InputError("rescale check: curves do not share a lag axis");
  }
  RescaleReport rep;
  rep.k = k;
  rep.lags = c_ss.lags;
  rep.ss = c_ss.values;
  const double sk = std::sqrt(k);
  const std::size_t n = c_ss.values.size();
  rep.rr_over_k.resize(n);
  rep.rs_over_sqrtk.resize(n);
  rep.sr_over_sqrtk.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    rep.rr_over_k[i] = c_rr.values[i] / k;
    rep.rs_over_sqrtk[i] = c_rs.values[i] / sk;
    rep.sr_over_sqrtk[i] = c_sr.values[i] / sk;
    if (rep.lags[i] < 1) continue;
    rep.max_discrepancy_rr = std::max(rep.max_discrepancy_rr, std::fabs(rep.rr_over_k[i] - rep.ss[i]));
    rep.max_discrepancy_rs = std::max(rep.max_discrepancy_rs, std::fabs(rep.rs_over_sqrtk[i] - rep.ss[i]));
    rep.max_discrepancy_sr = std::max(rep.max_discrepancy_sr, std::fabs(rep.sr_over_sqrtk[i] - rep.ss[i]));
  }
  rep.max_discrepancy =
      std::max({rep.max_discrepancy_rr, rep.max_discrepancy_rs, rep.max_discrepancy_sr});
  return rep;
}

double sorted_quantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
  const double h = (static_cast<double>(sorted.size()) - 1.0) * std::clamp(q, 0.0, 1.0);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

Bands bootstrap_bands(std::span<const double> x, std::span<const double> y,
                      std::span<const std::uint8_t> mask, const BootstrapConfig& cfg) {
  check_lengths(x.size(), mask.size(), y.size(), mask.size());
  const std::size_t n = x.size();
  check_tau(cfg.tau_max, n);
  if (cfg.block_len < 1) throw InputError("block length must be at least 1");
  if (cfg.block_len >= n) {
    throw StatsError("block length " + std::to_string(cfg.block_len) +
                     " must be shorter than the series (" + std::to_string(n) + ")");
  }
  if (cfg.n_boot < 100) throw InputError("need at least 100 bootstrap replicates");
  if (!(cfg.level > 0.0 && cfg.level < 1.0)) throw InputError("band level must lie in (0, 1)");

  const Prepared px = prepare(x, mask);
  require_variance(px, "x");
  require_variance(prepare(y, mask), "y");

  const std::size_t lags = static_cast<std::size_t>(cfg.tau_max) + 1;
  const std::size_t n_blocks = (n + cfg.block_len - 1) / cfg.block_len;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> reps(cfg.n_boot * lags, nan);

  auto run = [&](std::size_t first, std::size_t stride) {
    Scratch scratch;
    std::vector<double> ys(n), values;
    std::vector<std::uint8_t> ms(mask.empty() ? 0 : n);
    for (std::size_t i = first; i < cfg.n_boot; i += stride) {
      Rng rng(cfg.seed, kBootstrapStream + i);
      std::size_t pos = 0;
      for (std::size_t b = 0; b < n_blocks && pos < n; ++b) {
        const auto start = static_cast<std::size_t>(rng.below(n));
        for (std::size_t j = 0; j < cfg.block_len && pos < n; ++j, ++pos) {
          const std::size_t src = (start + j) % n;
          ys[pos] = y[src];
          if (!ms.empty()) ms[pos] = mask[src];
        }
      }
      const Prepared py = prepare(ys, ms);
      if (degenerate(py)) continue; // constant resample: no information
      const std::size_t usable = correlate(px, py, cfg.tau_max, cfg.demean, scratch, values);
      std::copy_n(values.begin(), usable, reps.begin() + static_cast<std::ptrdiff_t>(i * lags));
    }
  };

  unsigned threads = cfg.threads != 0 ? cfg.threads : std::thread::hardware_concurrency();
  threads = std::clamp<unsigned>(threads, 1u, static_cast<unsigned>(cfg.n_boot));
  if (threads == 1) {
    run(0, 1);
  } else {
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        try {
          run(w, threads);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  const double tail = (1.0 - cfg.level) / 2.0;
  Bands bands{std::vector<double>(lags, nan), std::vector<double>(lags, nan)};
  std::vector<double> column;
  column.reserve(cfg.n_boot);
  for (std::size_t tau = 0; tau < lags; ++tau) {
    column.clear();
    for (std::size_t i = 0; i < cfg.n_boot; ++i) {
      const double v = reps[i * lags + tau];
      if (std::isfinite(v)) column.push_back(v);
    }
    std::sort(column.begin(), column.end());
    bands.low[tau] = sorted_quantile(column, tail);
    bands.high[tau] = sorted_quantile(column, 1.0 - tail);
  }
  return bands;
}

} // namespace obsvol
