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

#include "obsvol/selftest.hpp"

#include "obsvol/error.hpp"

#include <cmath>
#include <sstream>

namespace obsvol {

namespace {

struct Scale {
  std::size_t n_days;
  std::size_t n_boot;
  double rescale_tolerance; // max |C/k - C_ss| over tau in 1..250, about 1.2x the worst of 40 seeds
};

Scale scale_for(SelftestMode mode) {
  return mode == SelftestMode::quick ? Scale{2000, 200, 0.35} : Scale{10000, 1000, 0.15};
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// Fraction of lags 1..end inside the curve's band.
double inside_fraction(const CorrelationCurve& c) {
  if (!c.has_band() || c.values.size() < 2) return 0.0;
  std::size_t inside = 0;
  for (std::size_t i = 1; i < c.values.size(); ++i) {
    inside += c.values[i] >= c.band_low[i] && c.values[i] <= c.band_high[i];
  }
  return static_cast<double>(inside) / static_cast<double>(c.values.size() - 1);
}

} // namespace

bool SelftestResult::passed() const {
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return !checks.empty();
}

std::string SelftestResult::summary() const {
  std::ostringstream os;
  for (const auto& c : checks) {
    os << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
  }
  os << (passed() ? "selftest passed" : "selftest FAILED") << '\n';
  return os.str();
}

SelftestResult run_selftest(SelftestMode mode, std::uint64_t seed, const KFormula& k_formula) {
  const KFormula kf = k_formula ? k_formula
                                : KFormula([](const MomentSummary& m, double r) { return compute_k(m, r); });
  const Scale scale = scale_for(mode);
  SelftestResult result;
  auto add = [&](std::string name, bool ok, std::string detail) {
    result.checks.push_back({std::move(name), ok, std::move(detail)});
  };

  // Published volatility moments must give k = 1/2.85.
  try {
    MomentSummary published;
    published.mean_sq = 0.00008583;
    published.mean = 0.008388;
    const double k = kf(published, 0.75);
    add("k_published_moments", std::isfinite(k) && std::fabs(k / 0.3509 - 1.0) <= 0.005,
        "k = " + fmt(k) + " (expect 0.3509 +/- 0.5%)");
  } catch (const std::exception& e) {
    add("k_published_moments", false, e.what());
  }

  SynthConfig cfg;
  cfg.n_days = scale.n_days;
  cfg.seed = seed;
  SynthPanel synth;
  AnalysisReport rep;
  IndexSeries series;
  try {
    synth = gen_market(cfg);
    std::stringstream csv;
    write_price_csv(csv, to_price_panel(synth));
    const PricePanel reread = parse_price_csv(csv);
    add("csv_round_trip", reread.n_tickers() == cfg.n_stocks && reread.n_dates() == cfg.n_days + 1,
        std::to_string(reread.n_tickers()) + " tickers, " + std::to_string(reread.n_dates()) +
            " dates");

    AnalyzeOptions opts;
    opts.n_boot = scale.n_boot;
    opts.seed = seed;
    opts.k_formula = kf;
    rep = analyze_panel(reread, opts);
    series = build_index_series(compute_returns(align_panel(reread, opts.missing)),
                                WeightScheme::equal());
    add("pipeline", true, "analyzed " + std::to_string(rep.n_days) + " days");
  } catch (const std::exception& e) {
    add("pipeline", false, e.what());
    return result;
  }

  {
    const double expect = kf(rep.sigma_moments, 0.75);
    add("k_consistent", rep.k == expect && rep.k > 0.0 && rep.k < 1.0,
        "k = " + fmt(rep.k) + ", sample ratio <|w|>^2/<w^2> = " + fmt(rep.abs_omega_sq_ratio_sample));
  }
  {
    const auto& id = rep.identities;
    add("identities",
        id.max_product_error <= 1e-12 && id.second_moment_gap <= 1e-12 && id.equal_weight_bound_ok,
        "max|r - s w| = " + fmt(id.max_product_error) + ", max|w| = " + fmt(id.max_abs_omega) +
            ", |<r^2> - <s^2 w^2>| = " + fmt(id.second_moment_gap));
  }
  {
    const auto& u = rep.uniformity;
    add("uniform_residuals", u.ks_statistic < rep.ks_null_q99,
        "KS = " + fmt(u.ks_statistic) + " vs null q99 = " + fmt(rep.ks_null_q99));
    // Var|w| = 1/4 and Var(w^2) = 4/5 for w uniform on [-sqrt3, sqrt3].
    const double n = static_cast<double>(u.count);
    const double se_abs = std::sqrt(0.25 / n), se_sq = std::sqrt(0.8 / n);
    add("residual_moments",
        std::fabs(u.mean_abs_omega - std::sqrt(3.0) / 2.0) <= 4.0 * se_abs &&
            std::fabs(u.mean_sq_omega - 1.0) <= 4.0 * se_sq,
        "<|w|> = " + fmt(u.mean_abs_omega) + ", <w^2> = " + fmt(u.mean_sq_omega));
  }
  {
    bool ok = true;
    std::string detail;
    for (const char* label : {"omega,sigma", "sigma,omega", "|omega|,|omega|", "omega,|r|", "|r|,omega"}) {
      const double f = inside_fraction(*rep.curve(label));
      ok = ok && f >= 0.90;
      detail += std::string(label) + " " + fmt(f) + "; ";
    }
    add("vanishing_correlations", ok, detail + "(need >= 0.9 of lags inside bands)");
  }
  {
    const auto& c = *rep.curve("sigma,sigma");
    bool ok = c.has_band() && c.values.size() > 20;
    for (std::size_t i = 1; ok && i <= 20; ++i) ok = c.values[i] > c.band_high[i];
    add("persistent_volatility", ok, "C_ss(1..20) above the null band, C_ss(20) = " +
                                         (c.values.size() > 20 ? fmt(c.values[20]) : "n/a"));
  }
  add("rescale", rep.rescale.max_discrepancy < scale.rescale_tolerance,
      "max discrepancy = " + fmt(rep.rescale.max_discrepancy) + " (tolerance " +
          fmt(scale.rescale_tolerance) + ")");
  try {
    const auto cmp = oracle_compare(series.sigma, synth.sigma_true);
    add("oracle_recovery", cmp.pearson >= 0.97 && std::fabs(cmp.ratio_mean - 0.5) <= 0.015,
        "pearson = " + fmt(cmp.pearson) + ", <s_hat/s_true> = " + fmt(cmp.ratio_mean));
  } catch (const std::exception& e) {
    add("oracle_recovery", false, e.what());
  }
  return result;
}

} // namespace obsvol
