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

#include "obsvol/report.hpp"

#include "format.hpp"
#include "obsvol/error.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>

namespace obsvol {

using nlohmann::json;

// ADL hooks for nlohmann::json. Non-finite doubles travel as null.
namespace {

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double num_of(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

json nums(const std::vector<double>& v) {
  json arr = json::array();
  for (double x : v) arr.push_back(num(x));
  return arr;
}

std::vector<double> nums_of(const json& j) {
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& x : j) out.push_back(num_of(x));
  return out;
}

} // namespace

void to_json(json& j, const MomentSummary& m) {
  j = json{{"mean", num(m.mean)},         {"mean_sq", num(m.mean_sq)},
           {"mean_abs", num(m.mean_abs)}, {"variance", num(m.variance)},
           {"count", m.count}};
}

void from_json(const json& j, MomentSummary& m) {
  m.mean = num_of(j.at("mean"));
  m.mean_sq = num_of(j.at("mean_sq"));
  m.mean_abs = num_of(j.at("mean_abs"));
  m.variance = num_of(j.at("variance"));
  m.count = j.at("count").get<std::size_t>();
}

void to_json(json& j, const CorrelationCurve& c) {
  j = json{{"label", c.label},
           {"lags", c.lags},
           {"values", nums(c.values)},
           {"band_low", nums(c.band_low)},
           {"band_high", nums(c.band_high)},
           {"truncated", c.truncated},
           {"degenerate", c.degenerate},
           {"warning", c.warning}};
}

void from_json(const json& j, CorrelationCurve& c) {
  c.label = j.at("label").get<std::string>();
  c.lags = j.at("lags").get<std::vector<int>>();
  c.values = nums_of(j.at("values"));
  c.band_low = nums_of(j.at("band_low"));
  c.band_high = nums_of(j.at("band_high"));
  c.truncated = j.at("truncated").get<bool>();
  c.degenerate = j.at("degenerate").get<bool>();
  c.warning = j.at("warning").get<std::string>();
}

void to_json(json& j, const UniformityReport& u) {
  j = json{{"ks_statistic", num(u.ks_statistic)},
           {"mean_abs_omega", num(u.mean_abs_omega)},
           {"mean_sq_omega", num(u.mean_sq_omega)},
           {"count", u.count},
           {"bin_edges", nums(u.bin_edges)},
           {"density", nums(u.density)},
           {"overflow", u.overflow},
           {"degenerate", u.degenerate}};
}

void from_json(const json& j, UniformityReport& u) {
  u.ks_statistic = num_of(j.at("ks_statistic"));
  u.mean_abs_omega = num_of(j.at("mean_abs_omega"));
  u.mean_sq_omega = num_of(j.at("mean_sq_omega"));
  u.count = j.at("count").get<std::size_t>();
  u.bin_edges = nums_of(j.at("bin_edges"));
  u.density = nums_of(j.at("density"));
  u.overflow = j.at("overflow").get<std::size_t>();
  u.degenerate = j.at("degenerate").get<bool>();
}

void to_json(json& j, const RescaleReport& r) {
  j = json{{"k", num(r.k)},
           {"lags", r.lags},
           {"rr_over_k", nums(r.rr_over_k)},
           {"rs_over_sqrtk", nums(r.rs_over_sqrtk)},
           {"sr_over_sqrtk", nums(r.sr_over_sqrtk)},
           {"ss", nums(r.ss)},
           {"max_discrepancy_rr", num(r.max_discrepancy_rr)},
           {"max_discrepancy_rs", num(r.max_discrepancy_rs)},
           {"max_discrepancy_sr", num(r.max_discrepancy_sr)},
           {"max_discrepancy", num(r.max_discrepancy)}};
}

void from_json(const json& j, RescaleReport& r) {
  r.k = num_of(j.at("k"));
  r.lags = j.at("lags").get<std::vector<int>>();
  r.rr_over_k = nums_of(j.at("rr_over_k"));
  r.rs_over_sqrtk = nums_of(j.at("rs_over_sqrtk"));
  r.sr_over_sqrtk = nums_of(j.at("sr_over_sqrtk"));
  r.ss = nums_of(j.at("ss"));
  r.max_discrepancy_rr = num_of(j.at("max_discrepancy_rr"));
  r.max_discrepancy_rs = num_of(j.at("max_discrepancy_rs"));
  r.max_discrepancy_sr = num_of(j.at("max_discrepancy_sr"));
  r.max_discrepancy = num_of(j.at("max_discrepancy"));
}

void to_json(json& j, const IdentityCheck& c) {
  j = json{{"max_product_error", num(c.max_product_error)},
           {"max_abs_omega", num(c.max_abs_omega)},
           {"second_moment_gap", num(c.second_moment_gap)},
           {"equal_weight_bound_ok", c.equal_weight_bound_ok}};
}

void from_json(const json& j, IdentityCheck& c) {
  c.max_product_error = num_of(j.at("max_product_error"));
  c.max_abs_omega = num_of(j.at("max_abs_omega"));
  c.second_moment_gap = num_of(j.at("second_moment_gap"));
  c.equal_weight_bound_ok = j.at("equal_weight_bound_ok").get<bool>();
}

namespace {

struct SeriesPair {
  const char* label;
  const std::vector<double>* x;
  const std::vector<double>* y;
};

CorrelationCurve first_lags(const CorrelationCurve& c, std::size_t n) {
  CorrelationCurve out = c;
  out.lags.resize(std::min(n, out.lags.size()));
  out.values.resize(out.lags.size());
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
  if (!out) throw InputError("error writing " + path.string());
}

std::uint64_t curve_seed(std::uint64_t seed, std::size_t index) {
  return seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(index) + 1);
}

} // namespace

const std::vector<std::string>& curve_labels() {
  static const std::vector<std::string> labels{
      "sigma,sigma", "|omega|,|omega|", "omega,sigma", "sigma,omega", "omega,|r|",
      "|r|,omega",   "|r|,|r|",         "|r|,sigma",   "sigma,|r|"};
  return labels;
}

const CorrelationCurve* AnalysisReport::curve(const std::string& label) const {
  for (const auto& c : curves) {
    if (c.label == label) return &c;
  }
  return nullptr;
}

std::string curve_file_stem(const std::string& label) {
  std::string out;
  for (std::size_t i = 0; i < label.size();) {
    if (label.compare(i, 7, "|omega|") == 0) {
      out += "absomega";
      i += 7;
    } else if (label.compare(i, 3, "|r|") == 0) {
      out += "absr";
      i += 3;
    } else {
      out += label[i] == ',' ? '_' : label[i];
      ++i;
    }
  }
  return out;
}

json options_to_json(const AnalyzeOptions& o) {
  return json{{"weights", o.weights},
              {"missing", to_string(o.missing)},
              {"tau_max", o.tau_max},
              {"block_len", o.block_len},
              {"n_boot", o.n_boot},
              {"bins", o.bins},
              {"seed", o.seed},
              {"demean", o.demean == Demean::full_sample ? "full-sample" : "per-lag"},
              {"abs_omega_sq_ratio", o.abs_omega_sq_ratio},
              {"ks_null_replicates", o.ks_null_replicates},
              {"columns", {{"date", o.columns.date},
                           {"ticker", o.columns.ticker},
                           {"close", o.columns.close}}}};
}

AnalysisReport analyze_series(const IndexSeries& s, std::size_t n_stocks, const AnalyzeOptions& opts) {
  const std::size_t n_days = s.size();
  if (s.sigma.size() != n_days || s.omega.size() != n_days || s.valid_mask.size() != n_days) {
    throw InputError("index series components differ in length");
  }
  if (opts.tau_max < 0) throw InputError("tau_max must be non-negative");
  if (2 * static_cast<std::size_t>(opts.tau_max) >= n_days) {
    throw StatsError("tau_max " + std::to_string(opts.tau_max) + " must be below T/2 (T = " +
                     std::to_string(n_days) + " days)");
  }

  AnalysisReport rep;
  rep.n_stocks = n_stocks;
  rep.n_days = n_days;
  rep.n_valid = s.valid_count();
  rep.weights = opts.weights;
  const auto& mask = s.valid_mask;

  rep.sigma_moments = sample_moments(s.sigma, mask);
  rep.omega_moments = sample_moments(s.omega, mask);
  rep.abs_omega_sq_ratio_used = opts.abs_omega_sq_ratio;
  rep.abs_omega_sq_ratio_sample =
      rep.omega_moments.mean_abs * rep.omega_moments.mean_abs / rep.omega_moments.mean_sq;
  rep.k = opts.k_formula ? opts.k_formula(rep.sigma_moments, opts.abs_omega_sq_ratio)
                         : compute_k(rep.sigma_moments, opts.abs_omega_sq_ratio);

  // Identities implied by r = sigma * omega.
  {
    double sum_r2 = 0.0, sum_s2w2 = 0.0;
    for (std::size_t t = 0; t < n_days; ++t) {
      if (!mask[t]) continue;
      const double prod = s.sigma[t] * s.omega[t];
      rep.identities.max_product_error =
          std::max(rep.identities.max_product_error, std::fabs(s.r[t] - prod));
      rep.identities.max_abs_omega = std::max(rep.identities.max_abs_omega, std::fabs(s.omega[t]));
      sum_r2 += s.r[t] * s.r[t];
      sum_s2w2 += prod * prod;
    }
    const auto nv = static_cast<double>(rep.n_valid);
    rep.identities.second_moment_gap = std::fabs(sum_r2 / nv - sum_s2w2 / nv);
    rep.identities.equal_weight_bound_ok =
        opts.weights != "equal" || rep.identities.max_abs_omega <= kSqrt3 + 1e-12;
  }

  const std::vector<double> abs_r = s.abs_r();
  const std::vector<double> abs_omega = s.abs_omega();
  const std::vector<SeriesPair> pairs{
      {"sigma,sigma", &s.sigma, &s.sigma},     {"|omega|,|omega|", &abs_omega, &abs_omega},
      {"omega,sigma", &s.omega, &s.sigma},     {"sigma,omega", &s.sigma, &s.omega},
      {"omega,|r|", &s.omega, &abs_r},         {"|r|,omega", &abs_r, &s.omega},
      {"|r|,|r|", &abs_r, &abs_r},             {"|r|,sigma", &abs_r, &s.sigma},
      {"sigma,|r|", &s.sigma, &abs_r}};

  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& p = pairs[i];
    CorrelationCurve curve;
    try {
      curve = cross_correlation(*p.x, *p.y, mask, opts.tau_max, opts.demean, p.label);
    } catch (const StatsError& e) {
      curve.label = p.label;
      curve.degenerate = true;
      curve.warning = e.what();
      rep.warnings.push_back(std::string(p.label) + ": " + e.what());
      rep.curves.push_back(std::move(curve));
      continue;
    }
    if (curve.truncated) rep.warnings.push_back(std::string(p.label) + ": " + curve.warning);
    if (opts.n_boot > 0) {
      BootstrapConfig bc;
      bc.tau_max = opts.tau_max;
      bc.block_len = opts.block_len;
      bc.n_boot = opts.n_boot;
      bc.seed = curve_seed(opts.seed, i);
      bc.demean = opts.demean;
      Bands bands = bootstrap_bands(*p.x, *p.y, mask, bc);
      bands.low.resize(curve.values.size());
      bands.high.resize(curve.values.size());
      curve.band_low = std::move(bands.low);
      curve.band_high = std::move(bands.high);
    }
    rep.curves.push_back(std::move(curve));
  }

  rep.uniformity = uniformity_test(s.omega, mask, opts.bins);
  if (rep.uniformity.degenerate) {
    rep.warnings.push_back("uniformity: all |omega| identical (single constituent?); "
                           "the uniform comparison is not informative");
  }
  if (opts.ks_null_replicates > 0) {
    rep.ks_null_q99 = ks_null_quantile(rep.uniformity.count, 0.99, opts.ks_null_replicates,
                                       opts.seed);
    rep.uniformity_consistent =
        !rep.uniformity.degenerate && rep.uniformity.ks_statistic < rep.ks_null_q99;
  } else {
    rep.warnings.push_back("uniformity: KS null calibration disabled");
  }

  const auto* c_rr = rep.curve("|r|,|r|");
  const auto* c_rs = rep.curve("|r|,sigma");
  const auto* c_sr = rep.curve("sigma,|r|");
  const auto* c_ss = rep.curve("sigma,sigma");
  if (c_rr->degenerate || c_rs->degenerate || c_sr->degenerate || c_ss->degenerate) {
    rep.warnings.push_back("rescale check skipped: degenerate curve");
  } else {
    const std::size_t n = std::min({c_rr->values.size(), c_rs->values.size(),
                                    c_sr->values.size(), c_ss->values.size()});
    rep.rescale = rescale_check(first_lags(*c_rr, n), first_lags(*c_rs, n), first_lags(*c_sr, n),
                                first_lags(*c_ss, n), rep.k);
  }

  rep.provenance.options = options_to_json(opts);
  return rep;
}

AnalysisReport analyze_panel(const PricePanel& raw, const AnalyzeOptions& opts) {
  const PricePanel aligned = align_panel(raw, opts.missing);
  const ReturnMatrix rm = compute_returns(aligned);

  WeightScheme weights;
  if (opts.weights == "equal") {
    weights = WeightScheme::equal();
  } else if (opts.weights == "price") {
    weights = WeightScheme::price(aligned);
  } else if (opts.weights.starts_with("explicit:")) {
    const std::filesystem::path path = opts.weights.substr(9);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open weight file " + path.string());
    weights = WeightScheme::explicit_weights(parse_weight_csv(in, rm));
  } else {
    throw InputError("unknown weight scheme '" + opts.weights + "' (equal|price|explicit:<csv>)");
  }

  // Flat days (all constituents unchanged, e.g. forward-filled) carry no
  // residual; they are masked and reported, not fatal.
  const IndexSeries series = build_index_series(rm, weights);
  AnalysisReport rep = analyze_series(series, rm.n_stocks(), opts);
  if (rep.n_valid < rep.n_days) {
    rep.warnings.push_back(std::to_string(rep.n_days - rep.n_valid) +
                           " day(s) with zero volatility masked");
  }
  return rep;
}

std::string sha256_hex(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 init failed");
  }
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

AnalysisReport run_analyze(const std::filesystem::path& input, const AnalyzeOptions& opts,
                           const std::filesystem::path& out_dir) {
  const PricePanel raw = read_price_csv(input, opts.columns);
  AnalysisReport rep = analyze_panel(raw, opts);
  rep.provenance.input_path = input.string();
  rep.provenance.input_sha256 = sha256_hex(input);

  // Render everything before touching the output directory.
  std::vector<std::pair<std::string, std::string>> files;
  files.emplace_back("report.json", report_to_json(rep).dump(2) + "\n");
  for (const auto& c : rep.curves) {
    std::ostringstream os;
    os << "lag,value,band_low,band_high\n";
    for (std::size_t i = 0; i < c.values.size(); ++i) {
      os << c.lags[i] << ',' << detail::format_double(c.values[i]) << ',';
      if (c.has_band()) {
        os << detail::format_double(c.band_low[i]) << ',' << detail::format_double(c.band_high[i]);
      } else {
        os << ',';
      }
      os << '\n';
    }
    files.emplace_back("curve_" + curve_file_stem(c.label) + ".csv", os.str());
  }
  {
    std::ostringstream os;
    os << "lag,absr_absr_over_k,absr_sigma_over_sqrtk,sigma_absr_over_sqrtk,sigma_sigma\n";
    const auto& r = rep.rescale;
    for (std::size_t i = 0; i < r.lags.size(); ++i) {
      os << r.lags[i] << ',' << detail::format_double(r.rr_over_k[i]) << ','
         << detail::format_double(r.rs_over_sqrtk[i]) << ','
         << detail::format_double(r.sr_over_sqrtk[i]) << ',' << detail::format_double(r.ss[i])
         << '\n';
    }
    files.emplace_back("rescaled.csv", os.str());
  }
  {
    std::ostringstream os;
    os << "bin_left,bin_right,density\n";
    const auto& u = rep.uniformity;
    for (std::size_t b = 0; b < u.density.size(); ++b) {
      os << detail::format_double(u.bin_edges[b]) << ',' << detail::format_double(u.bin_edges[b + 1])
         << ',' << detail::format_double(u.density[b]) << '\n';
    }
    files.emplace_back("histogram.csv", os.str());
  }

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw InputError("cannot create output directory " + out_dir.string());
  for (const auto& [name, text] : files) write_file(out_dir / name, text);
  return rep;
}

void run_synth(const SynthConfig& cfg, const std::filesystem::path& out_dir) {
  const SynthPanel panel = gen_market(cfg);
  std::ostringstream prices, sigma;
  write_price_csv(prices, to_price_panel(panel));
  write_sigma_csv(sigma, panel.returns.dates, panel.sigma_true);

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw InputError("cannot create output directory " + out_dir.string());
  write_file(out_dir / "prices.csv", prices.str());
  write_file(out_dir / "sigma_true.csv", sigma.str());
}

json report_to_json(const AnalysisReport& r) {
  return json{{"tool_version", r.provenance.tool_version},
              {"n_stocks", r.n_stocks},
              {"n_days", r.n_days},
              {"n_valid", r.n_valid},
              {"weights", r.weights},
              {"moments", {{"sigma", r.sigma_moments}, {"omega", r.omega_moments}}},
              {"abs_omega_sq_ratio",
               {{"used", num(r.abs_omega_sq_ratio_used)},
                {"sample", num(r.abs_omega_sq_ratio_sample)}}},
              {"k", num(r.k)},
              {"curves", r.curves},
              {"uniformity", r.uniformity},
              {"ks_null_q99", num(r.ks_null_q99)},
              {"uniformity_consistent", r.uniformity_consistent},
              {"rescale", r.rescale},
              {"identities", r.identities},
              {"warnings", r.warnings},
              {"provenance",
               {{"tool_version", r.provenance.tool_version},
                {"input_path", r.provenance.input_path},
                {"input_sha256", r.provenance.input_sha256},
                {"options", r.provenance.options}}}};
}

AnalysisReport report_from_json(const json& j) {
  AnalysisReport r;
  r.n_stocks = j.at("n_stocks").get<std::size_t>();
  r.n_days = j.at("n_days").get<std::size_t>();
  r.n_valid = j.at("n_valid").get<std::size_t>();
  r.weights = j.at("weights").get<std::string>();
  r.sigma_moments = j.at("moments").at("sigma").get<MomentSummary>();
  r.omega_moments = j.at("moments").at("omega").get<MomentSummary>();
  r.abs_omega_sq_ratio_used = num_of(j.at("abs_omega_sq_ratio").at("used"));
  r.abs_omega_sq_ratio_sample = num_of(j.at("abs_omega_sq_ratio").at("sample"));
  r.k = num_of(j.at("k"));
  r.curves = j.at("curves").get<std::vector<CorrelationCurve>>();
  r.uniformity = j.at("uniformity").get<UniformityReport>();
  r.ks_null_q99 = num_of(j.at("ks_null_q99"));
  r.uniformity_consistent = j.at("uniformity_consistent").get<bool>();
  r.rescale = j.at("rescale").get<RescaleReport>();
  r.identities = j.at("identities").get<IdentityCheck>();
  r.warnings = j.at("warnings").get<std::vector<std::string>>();
  const auto& p = j.at("provenance");
  r.provenance.tool_version = p.at("tool_version").get<std::string>();
  r.provenance.input_path = p.at("input_path").get<std::string>();
  r.provenance.input_sha256 = p.at("input_sha256").get<std::string>();
  r.provenance.options = p.at("options");
  return r;
}

} // namespace obsvol
