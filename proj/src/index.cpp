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

#include "obsvol/index.hpp"

#include "format.hpp"
#include "obsvol/error.hpp"

#include <cmath>
#include <istream>
#include <string>
#include <unordered_map>

namespace obsvol {

namespace {

MatrixD normalize_columns(MatrixD w, const char* what) {
  for (std::size_t t = 0; t < w.cols(); ++t) {
    double total = 0.0;
    for (std::size_t a = 0; a < w.rows(); ++a) {
      const double v = w(a, t);
      if (!std::isfinite(v) || v < 0.0) {
        throw InputError(std::string(what) + " weight must be finite and non-negative (day " +
                         std::to_string(t) + ")");
      }
      total += v;
    }
    if (!(total > 0.0)) {
      throw InputError(std::string(what) + " weights sum to zero on day " + std::to_string(t));
    }
    for (std::size_t a = 0; a < w.rows(); ++a) w(a, t) /= total;
  }
  return w;
}

void check_dims(const ReturnMatrix& rm, const WeightScheme& w) {
  if (rm.n_stocks() == 0 || rm.n_days() == 0) throw InputError("empty return matrix");
  if (rm.returns.rows() != rm.n_stocks() || rm.returns.cols() != rm.n_days()) {
    throw InputError("return matrix does not match dates/tickers");
  }
  if (w.kind != WeightKind::equal &&
      (w.weights.rows() != rm.n_stocks() || w.weights.cols() != rm.n_days())) {
    throw InputError("weight matrix is " + std::to_string(w.weights.rows()) + "x" +
                     std::to_string(w.weights.cols()) + ", returns are " +
                     std::to_string(rm.n_stocks()) + "x" + std::to_string(rm.n_days()));
  }
}

} // namespace

const char* to_string(WeightKind kind) {
  switch (kind) {
    case WeightKind::equal: return "equal";
    case WeightKind::price: return "price";
    case WeightKind::capitalization: return "capitalization";
    case WeightKind::explicit_weights: return "explicit";
  }
  return "?";
}

WeightScheme WeightScheme::price(const PricePanel& aligned) {
  if (!aligned.is_rectangular() || aligned.n_dates() < 2) {
    throw InputError("price weights need an aligned panel with at least 2 dates");
  }
  MatrixD w(aligned.n_tickers(), aligned.n_dates() - 1);
  for (std::size_t a = 0; a < w.rows(); ++a) {
    for (std::size_t t = 0; t < w.cols(); ++t) w(a, t) = aligned.prices(a, t);
  }
  return {WeightKind::price, normalize_columns(std::move(w), "price")};
}

WeightScheme WeightScheme::capitalization(MatrixD raw) {
  return {WeightKind::capitalization, normalize_columns(std::move(raw), "capitalization")};
}

WeightScheme WeightScheme::explicit_weights(MatrixD raw) {
  return {WeightKind::explicit_weights, normalize_columns(std::move(raw), "explicit")};
}

MatrixD parse_weight_csv(std::istream& in, const ReturnMatrix& rm) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("empty weight file");
  const auto header = detail::split_csv(line);
  const auto find = [&](std::string_view name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw InputError("weight file lacks column '" + std::string(name) + "'", 1);
  };
  const std::size_t dc = find("date"), tc = find("ticker"), wc = find("weight");

  std::unordered_map<std::string, std::size_t> day_of, stock_of;
  for (std::size_t t = 0; t < rm.n_days(); ++t) day_of.emplace(rm.dates[t], t);
  for (std::size_t a = 0; a < rm.n_stocks(); ++a) stock_of.emplace(rm.tickers[a], a);

  MatrixD w(rm.n_stocks(), rm.n_days(), std::nan(""));
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto f = detail::split_csv(line);
    if (f.size() != header.size()) throw InputError("wrong number of fields", line_no);
    const auto day = day_of.find(std::string(f[dc]));
    const auto stock = stock_of.find(std::string(f[tc]));
    if (day == day_of.end() || stock == stock_of.end()) continue;
    double v = 0.0;
    if (!detail::parse_double(f[wc], v) || !std::isfinite(v) || v < 0.0) {
      throw InputError("bad weight '" + std::string(f[wc]) + "'", line_no);
    }
    double& cell = w(stock->second, day->second);
    if (!std::isnan(cell)) throw InputError("duplicate weight record", line_no);
    cell = v;
  }
  for (std::size_t a = 0; a < w.rows(); ++a) {
    for (std::size_t t = 0; t < w.cols(); ++t) {
      if (std::isnan(w(a, t))) {
        throw InputError("no weight for " + rm.tickers[a] + " on " + rm.dates[t]);
      }
    }
  }
  return w;
}

std::vector<double> index_return(const ReturnMatrix& rm, const WeightScheme& w) {
  check_dims(rm, w);
  const std::size_t n = rm.n_stocks(), n_days = rm.n_days();
  std::vector<double> r(n_days, 0.0);
  if (w.kind == WeightKind::equal) {
    for (std::size_t a = 0; a < n; ++a) {
      const auto row = rm.returns.row(a);
      for (std::size_t t = 0; t < n_days; ++t) r[t] += row[t];
    }
    for (auto& v : r) v /= static_cast<double>(n);
  } else {
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t t = 0; t < n_days; ++t) r[t] += w.weights(a, t) * rm.returns(a, t);
    }
  }
  return r;
}

std::vector<double> observable_volatility(const ReturnMatrix& rm, const WeightScheme& w) {
  check_dims(rm, w);
  const std::size_t n = rm.n_stocks(), n_days = rm.n_days();
  std::vector<double> sigma(n_days, 0.0);
  if (w.kind == WeightKind::equal) {
    for (std::size_t a = 0; a < n; ++a) {
      const auto row = rm.returns.row(a);
      for (std::size_t t = 0; t < n_days; ++t) sigma[t] += std::fabs(row[t]);
    }
    for (auto& v : sigma) v /= kSqrt3 * static_cast<double>(n);
  } else {
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t t = 0; t < n_days; ++t) {
        sigma[t] += w.weights(a, t) * std::fabs(rm.returns(a, t));
      }
    }
    for (auto& v : sigma) v /= kSqrt3;
  }
  return sigma;
}

Residuals residual_series(std::span<const double> r, std::span<const double> sigma) {
  if (r.size() != sigma.size()) {
    throw InputError("residual_series: length mismatch (" + std::to_string(r.size()) + " vs " +
                     std::to_string(sigma.size()) + ")");
  }
  Residuals out{std::vector<double>(r.size(), 0.0), std::vector<std::uint8_t>(r.size(), 0)};
  for (std::size_t t = 0; t < r.size(); ++t) {
    if (sigma[t] > 0.0) {
      out.omega[t] = r[t] / sigma[t];
      out.valid[t] = 1;
    }
  }
  return out;
}

std::size_t IndexSeries::valid_count() const {
  std::size_t n = 0;
  for (auto v : valid_mask) n += v != 0;
  return n;
}

std::vector<double> IndexSeries::abs_r() const {
  std::vector<double> out(r.size());
  for (std::size_t t = 0; t < r.size(); ++t) out[t] = std::fabs(r[t]);
  return out;
}

std::vector<double> IndexSeries::abs_omega() const {
  std::vector<double> out(omega.size());
  for (std::size_t t = 0; t < omega.size(); ++t) out[t] = std::fabs(omega[t]);
  return out;
}

IndexSeries build_index_series(const ReturnMatrix& rm, const WeightScheme& w) {
  IndexSeries s;
  s.dates = rm.dates;
  s.r = index_return(rm, w);
  s.sigma = observable_volatility(rm, w);
  auto res = residual_series(s.r, s.sigma);
  s.omega = std::move(res.omega);
  s.valid_mask = std::move(res.valid);
  return s;
}

} // namespace obsvol
