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

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace obsvol {

enum class VolModel { lognormal_ar1, constant };
enum class ResidualModel { uniform, gaussian };

// How per-stock residuals relate across stocks on the same day.
enum class Coupling {
  // Magnitudes |w_a(t)| are i.i.d. draws from the residual law; signs are
  // allocated across stocks so that the equal-weight index residual
  // sqrt3 * sum_a m_a s_a / sum_a m_a equals a fresh draw from the residual
  // law (clipped to [-sqrt3, sqrt3], the reachable range).
  market,
  // w_a(t) i.i.d. over stocks and days. The index residual then concentrates
  // near zero as the number of stocks grows.
  independent,
};

VolModel parse_vol_model(const std::string& name);
ResidualModel parse_residual_model(const std::string& name);
Coupling parse_coupling(const std::string& name);
const char* to_string(VolModel v);
const char* to_string(ResidualModel v);
const char* to_string(Coupling v);

struct SynthConfig {
  std::size_t n_stocks = 65;
  std::size_t n_days = 10000; // returns; the price panel has one more date
  VolModel vol_model = VolModel::lognormal_ar1;
  double vol_level = 0.015; // exp(mu) for lognormal-AR1, the level for constant
  double phi = 0.98;
  double vol_scale = 0.1; // innovation sd of ln sigma
  ResidualModel residual = ResidualModel::uniform;
  Coupling coupling = Coupling::market;
  double idio_scale = 0.0; // sd of the log of the per-stock factor 1 + delta
  std::uint64_t seed = 1;

  // Throws InputError.
  void validate() const;
};

struct SynthPanel {
  ReturnMatrix returns;
  std::vector<double> sigma_true;
  MatrixD residuals;  // w_a(t)
  MatrixD dispersion; // 1 + delta_a(t), mean one
  SynthConfig config;
};

// Common volatility factor. lognormal-AR1:
//   ln s(t) = mu + phi (ln s(t-1) - mu) + vol_scale * e(t),
// started from the stationary law.
std::vector<double> gen_volatility_path(const SynthConfig& cfg);

// r_a(t) = sigma_true(t) * (1 + delta_a(t)) * w_a(t).
SynthPanel gen_market(const SynthConfig& cfg);

// Prices with S_a(0) = s0 and S_a(t) = S_a(t-1) exp(r_a(t)).
PricePanel to_price_panel(const SynthPanel& panel, double s0 = 100.0);

// `count` consecutive weekdays starting 1973-01-02.
std::vector<std::string> trading_dates(std::size_t count);

void write_sigma_csv(std::ostream& out, std::span<const std::string> dates,
                     std::span<const double> sigma);

struct OracleComparison {
  double pearson = 0.0;
  double ratio_mean = 0.0; // <sigma_hat / sigma_true>
  double ratio_cv = 0.0;   // sd / mean of that ratio
};

OracleComparison oracle_compare(std::span<const double> sigma_hat, std::span<const double> sigma_true);

} // namespace obsvol
