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

#include "obsvol/matrix.hpp"
#include "obsvol/panel.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace obsvol {

inline constexpr double kSqrt3 = 1.7320508075688772;

enum class WeightKind { equal, price, capitalization, explicit_weights };

const char* to_string(WeightKind kind);

// Per-day constituent weights. For the equal kind the matrix is left empty
// and 1/N is used implicitly; every other kind carries an N x T matrix whose
// columns are non-negative and sum to one.
struct WeightScheme {
  WeightKind kind = WeightKind::equal;
  MatrixD weights;

  static WeightScheme equal() { return {}; }

  // w_a(t) proportional to the previous close S_a(t-1), so the weight for a
  // day is known before that day's return is.
  static WeightScheme price(const PricePanel& aligned);

  // Normalizes each column of `raw` (N x T, non-negative, positive column
  // sums). Throws InputError otherwise.
  static WeightScheme capitalization(MatrixD raw);
  static WeightScheme explicit_weights(MatrixD raw);

  double at(std::size_t stock, std::size_t day, std::size_t n_stocks) const {
    return kind == WeightKind::equal ? 1.0 / static_cast<double>(n_stocks) : weights(stock, day);
  }
};

// Long-format weight file (date,ticker,weight). Every (return date, ticker)
// of `rm` must be present; rows for other dates are ignored.
MatrixD parse_weight_csv(std::istream& in, const ReturnMatrix& rm);

// Index return r(t) = sum_a w_a(t) r_a(t).
std::vector<double> index_return(const ReturnMatrix& rm, const WeightScheme& w);

// Observable volatility sigma(t) = (1/sqrt3) sum_a w_a(t) |r_a(t)|.
std::vector<double> observable_volatility(const ReturnMatrix& rm, const WeightScheme& w);

struct Residuals {
  std::vector<double> omega;
  std::vector<std::uint8_t> valid; // 1 where sigma > 0
};

// omega(t) = r(t)/sigma(t) where sigma(t) > 0; elsewhere omega is stored as 0
// and the day is marked invalid.
Residuals residual_series(std::span<const double> r, std::span<const double> sigma);

struct IndexSeries {
  std::vector<std::string> dates;
  std::vector<double> r;
  std::vector<double> sigma;
  std::vector<double> omega;
  std::vector<std::uint8_t> valid_mask;

  std::size_t size() const noexcept { return r.size(); }
  std::size_t valid_count() const;
  std::vector<double> abs_r() const;
  std::vector<double> abs_omega() const;
};

IndexSeries build_index_series(const ReturnMatrix& rm, const WeightScheme& w);

} // namespace obsvol
