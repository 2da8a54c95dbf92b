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

#include "obsvol/synth.hpp"

#include "format.hpp"
#include "obsvol/error.hpp"
#include "obsvol/index.hpp"
#include "obsvol/random.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

namespace obsvol {

namespace {

constexpr std::uint64_t kVolStream = 1;
constexpr std::uint64_t kDayStream = 2;
constexpr std::uint64_t kStockStreamBase = 0x100000;

// Chooses signs s_a in {-1, +1} so that sum_a s_a w_a is as close as
// practical (from below) to x * sum_a w_a, x in [-1, 1]. Random-order greedy
// fill of the positive side, then best single swaps between the sides.
void allocate_signs(std::span<const double> w, double x, Rng& rng, std::vector<std::size_t>& order,
                    std::span<double> signs) {
  const std::size_t n = w.size();
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  const double target = 0.5 * (1.0 + x) * total;

  order.resize(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(std::span<std::size_t>(order));

  double filled = 0.0;
  for (std::size_t a : order) {
    if (filled + w[a] <= target) {
      filled += w[a];
      signs[a] = 1.0;
    } else {
      signs[a] = -1.0;
    }
  }

  std::vector<std::pair<double, std::size_t>> pos, neg;
  for (int round = 0; round < 8; ++round) {
    const double gap = target - filled;
    if (gap <= 0.0) break;
    pos.clear();
    neg.clear();
    for (std::size_t a = 0; a < n; ++a) (signs[a] > 0 ? pos : neg).emplace_back(w[a], a);
    std::sort(neg.begin(), neg.end());
    double best = 0.0;
    std::size_t out_idx = n, in_idx = n;
    for (const auto& [wp, ap] : pos) {
      // Largest negative-side weight not exceeding wp + gap.
      auto it = std::upper_bound(neg.begin(), neg.end(), std::make_pair(wp + gap, n));
      if (it == neg.begin()) continue;
      --it;
      const double d = it->first - wp;
      if (d > best) {
        best = d;
        out_idx = ap;
        in_idx = it->second;
      }
    }
    if (out_idx == n) break;
    signs[out_idx] = -1.0;
    signs[in_idx] = 1.0;
    filled += best;
  }
}

std::string ticker_name(std::size_t i, std::size_t n) {
  const std::size_t width = std::max<std::size_t>(3, std::to_string(n).size());
  std::string digits = std::to_string(i + 1);
  return "S" + std::string(width - digits.size(), '0') + digits;
}

} // namespace

VolModel parse_vol_model(const std::string& name) {
  if (name == "lognormal-ar1") return VolModel::lognormal_ar1;
  if (name == "constant") return VolModel::constant;
  throw InputError("unknown volatility model '" + name + "' (lognormal-ar1|constant)");
}

ResidualModel parse_residual_model(const std::string& name) {
  if (name == "uniform") return ResidualModel::uniform;
  if (name == "gaussian") return ResidualModel::gaussian;
  throw InputError("unknown residual model '" + name + "' (uniform|gaussian)");
}

Coupling parse_coupling(const std::string& name) {
  if (name == "market") return Coupling::market;
  if (name == "independent") return Coupling::independent;
  throw InputError("unknown coupling '" + name + "' (market|independent)");
}

const char* to_string(VolModel v) {
  return v == VolModel::lognormal_ar1 ? "lognormal-ar1" : "constant";
}
const char* to_string(ResidualModel v) {
  return v == ResidualModel::uniform ? "uniform" : "gaussian";
}
const char* to_string(Coupling v) { return v == Coupling::market ? "market" : "independent"; }

void SynthConfig::validate() const {
  if (n_stocks < 1) throw InputError("n_stocks must be at least 1");
  if (n_days < 2) throw InputError("n_days must be at least 2");
  if (!(vol_level > 0.0) || !std::isfinite(vol_level)) throw InputError("vol_level must be positive");
  if (!(phi >= 0.0 && phi < 1.0)) throw InputError("phi must lie in [0, 1)");
  if (!(vol_scale >= 0.0) || !std::isfinite(vol_scale)) throw InputError("vol_scale must be >= 0");
  if (!(idio_scale >= 0.0) || !std::isfinite(idio_scale)) throw InputError("idio_scale must be >= 0");
}

std::vector<double> gen_volatility_path(const SynthConfig& cfg) {
  cfg.validate();
  std::vector<double> sigma(cfg.n_days, cfg.vol_level);
  if (cfg.vol_model == VolModel::constant) return sigma;

  Rng rng(cfg.seed, kVolStream);
  const double mu = std::log(cfg.vol_level);
  const double stationary_sd = cfg.vol_scale / std::sqrt(1.0 - cfg.phi * cfg.phi);
  double log_sigma = mu + stationary_sd * rng.normal();
  sigma[0] = std::exp(log_sigma);
  for (std::size_t t = 1; t < cfg.n_days; ++t) {
    log_sigma = mu + cfg.phi * (log_sigma - mu) + cfg.vol_scale * rng.normal();
    sigma[t] = std::exp(log_sigma);
  }
  return sigma;
}

SynthPanel gen_market(const SynthConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.n_stocks, n_days = cfg.n_days;

  SynthPanel out;
  out.config = cfg;
  out.sigma_true = gen_volatility_path(cfg);
  out.residuals = MatrixD(n, n_days);
  out.dispersion = MatrixD(n, n_days, 1.0);

  // Per-stock magnitudes, dispersion factors and (independent coupling) signs.
  const double xi = cfg.idio_scale;
  for (std::size_t a = 0; a < n; ++a) {
    Rng rng(cfg.seed, kStockStreamBase + a);
    for (std::size_t t = 0; t < n_days; ++t) {
      const double magnitude = cfg.residual == ResidualModel::uniform
                                   ? rng.uniform(0.0, kSqrt3)
                                   : std::fabs(rng.normal());
      if (xi > 0.0) out.dispersion(a, t) = std::exp(xi * rng.normal() - 0.5 * xi * xi);
      double sign = 1.0;
      if (cfg.coupling == Coupling::independent) sign = rng.uniform01() < 0.5 ? -1.0 : 1.0;
      out.residuals(a, t) = sign * magnitude;
    }
  }

  if (cfg.coupling == Coupling::market) {
    Rng rng(cfg.seed, kDayStream);
    std::vector<double> w(n), signs(n);
    std::vector<std::size_t> order;
    for (std::size_t t = 0; t < n_days; ++t) {
      double x = 0.0;
      if (cfg.residual == ResidualModel::uniform) {
        x = rng.uniform(-1.0, 1.0);
      } else {
        x = std::clamp(rng.normal(), -kSqrt3, kSqrt3) / kSqrt3;
      }
      const bool flip = rng.uniform01() < 0.5;
      for (std::size_t a = 0; a < n; ++a) w[a] = out.dispersion(a, t) * out.residuals(a, t);
      allocate_signs(w, flip ? -x : x, rng, order, signs);
      for (std::size_t a = 0; a < n; ++a) {
        out.residuals(a, t) *= flip ? -signs[a] : signs[a];
      }
    }
  }

  auto dates = trading_dates(n_days + 1);
  out.returns.dates.assign(std::make_move_iterator(dates.begin() + 1),
                           std::make_move_iterator(dates.end()));
  out.returns.tickers.reserve(n);
  for (std::size_t a = 0; a < n; ++a) out.returns.tickers.push_back(ticker_name(a, n));
  out.returns.returns = MatrixD(n, n_days);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t t = 0; t < n_days; ++t) {
      out.returns.returns(a, t) = out.sigma_true[t] * out.dispersion(a, t) * out.residuals(a, t);
    }
  }
  return out;
}

PricePanel to_price_panel(const SynthPanel& panel, double s0) {
  const auto& rm = panel.returns;
  PricePanel p;
  p.tickers = rm.tickers;
  p.dates = trading_dates(rm.n_days() + 1);
  p.prices = MatrixD(rm.n_stocks(), rm.n_days() + 1);
  for (std::size_t a = 0; a < rm.n_stocks(); ++a) {
    double s = s0;
    p.prices(a, 0) = s;
    for (std::size_t t = 0; t < rm.n_days(); ++t) {
      s *= std::exp(rm.returns(a, t));
      p.prices(a, t + 1) = s;
    }
  }
  return p;
}

std::vector<std::string> trading_dates(std::size_t count) {
  using namespace std::chrono;
  std::vector<std::string> out;
  out.reserve(count);
  sys_days day = year{1973} / January / 2;
  char buf[16];
  while (out.size() < count) {
    const weekday wd{day};
    if (wd != Saturday && wd != Sunday) {
      const year_month_day ymd{day};
      std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                    static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
      out.emplace_back(buf);
    }
    day += days{1};
  }
  return out;
}

void write_sigma_csv(std::ostream& out, std::span<const std::string> dates,
                     std::span<const double> sigma) {
  out << "date,sigma_true\n";
  for (std::size_t t = 0; t < sigma.size(); ++t) {
    out << dates[t] << ',' << detail::format_double(sigma[t]) << '\n';
  }
}

OracleComparison oracle_compare(std::span<const double> sigma_hat, std::span<const double> sigma_true) {
  if (sigma_hat.size() != sigma_true.size()) {
    throw InputError("oracle_compare: length mismatch");
  }
  if (sigma_hat.size() < 2) throw StatsError("oracle_compare needs at least 2 days");
  const auto n = static_cast<double>(sigma_hat.size());
  double mh = 0.0, mt = 0.0, mr = 0.0;
  for (std::size_t t = 0; t < sigma_hat.size(); ++t) {
    if (!(sigma_true[t] > 0.0)) throw InputError("oracle_compare: sigma_true must be positive");
    mh += sigma_hat[t];
    mt += sigma_true[t];
    mr += sigma_hat[t] / sigma_true[t];
  }
  mh /= n;
  mt /= n;
  mr /= n;
  double shh = 0.0, stt = 0.0, sht = 0.0, srr = 0.0;
  for (std::size_t t = 0; t < sigma_hat.size(); ++t) {
    const double dh = sigma_hat[t] - mh, dt = sigma_true[t] - mt;
    const double dr = sigma_hat[t] / sigma_true[t] - mr;
    shh += dh * dh;
    stt += dt * dt;
    sht += dh * dt;
    srr += dr * dr;
  }
  if (!(shh > 0.0) || !(stt > 0.0)) throw StatsError("oracle_compare: zero variance");
  OracleComparison c;
  c.pearson = sht / std::sqrt(shh * stt);
  c.ratio_mean = mr;
  c.ratio_cv = std::sqrt(srr / n) / mr;
  return c;
}

} // namespace obsvol
