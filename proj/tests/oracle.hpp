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

// Slow reference implementations used as test oracles. Deliberately plain:
// no shared code with the library beyond the standard library.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace oracle {

inline bool ok(const std::vector<std::uint8_t>& m, std::size_t t) { return m.empty() || m[t] != 0; }

// Full-sample centred lagged correlation, straight from the definition:
//   C(tau) = mean over pairs (t+tau, t) with both valid of
//            (x(t+tau) - mean_x)(y(t) - mean_y) / (sd_x sd_y)
// with means and population sds over each series' own valid entries.
// Per-lag variant: Pearson correlation of the overlapping pairs.
inline std::vector<double> cross_correlation(const std::vector<double>& x,
                                             const std::vector<std::uint8_t>& mx,
                                             const std::vector<double>& y,
                                             const std::vector<std::uint8_t>& my, int tau_max,
                                             bool per_lag = false) {
  const std::size_t n = x.size();
  auto mean_sd = [n](const std::vector<double>& v, const std::vector<std::uint8_t>& m, double& mean,
                     double& sd) {
    double s = 0;
    double c = 0;
    for (std::size_t t = 0; t < n; ++t)
      if (ok(m, t)) {
        s += v[t];
        c += 1;
      }
    mean = s / c;
    double q = 0;
    for (std::size_t t = 0; t < n; ++t)
      if (ok(m, t)) q += (v[t] - mean) * (v[t] - mean);
    sd = std::sqrt(q / c);
  };
  double xm, xs, ym, ys;
  mean_sd(x, mx, xm, xs);
  mean_sd(y, my, ym, ys);

  std::vector<double> out;
  for (int tau = 0; tau <= tau_max; ++tau) {
    std::vector<double> a, b;
    for (std::size_t t = 0; t + static_cast<std::size_t>(tau) < n; ++t) {
      const std::size_t u = t + static_cast<std::size_t>(tau);
      if (ok(mx, u) && ok(my, t)) {
        a.push_back(x[u]);
        b.push_back(y[t]);
      }
    }
    if (a.size() < 2) break;
    const double c = static_cast<double>(a.size());
    if (!per_lag) {
      double s = 0;
      for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - xm) * (b[i] - ym);
      out.push_back(s / c / (xs * ys));
    } else {
      double am = 0, bm = 0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        am += a[i];
        bm += b[i];
      }
      am /= c;
      bm /= c;
      double sab = 0, saa = 0, sbb = 0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - am) * (b[i] - bm);
        saa += (a[i] - am) * (a[i] - am);
        sbb += (b[i] - bm) * (b[i] - bm);
      }
      if (saa <= 0 || sbb <= 0) break;
      out.push_back(sab / std::sqrt(saa * sbb));
    }
  }
  return out;
}

inline std::vector<double> cross_correlation(const std::vector<double>& x,
                                             const std::vector<double>& y, int tau_max) {
  return cross_correlation(x, {}, y, {}, tau_max);
}

// sup_u |F_n(u) - u/upper| by brute force: the ECDF is evaluated by counting
// at every sample point and just below it.
inline double ks_uniform(const std::vector<double>& v, double upper) {
  const double n = static_cast<double>(v.size());
  double d = 0;
  for (double p : v) {
    double below = 0, at_or_below = 0;
    for (double q : v) {
      if (q < p) below += 1;
      if (q <= p) at_or_below += 1;
    }
    const double f = std::clamp(p / upper, 0.0, 1.0);
    d = std::max({d, std::fabs(at_or_below / n - f), std::fabs(below / n - f)});
  }
  return d;
}

inline double mean(const std::vector<double>& v) {
  long double s = 0;
  for (double a : v) s += a;
  return static_cast<double>(s / static_cast<long double>(v.size()));
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double ma = mean(a), mb = mean(b);
  long double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return static_cast<double>(sab / std::sqrt(saa * sbb));
}

// Type-7 quantile of an unsorted sample.
inline double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - std::floor(h)) * (v[hi] - v[lo]);
}

} // namespace oracle
