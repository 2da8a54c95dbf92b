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

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace obsvol {

// Daily closing prices S_a(t), one row per ticker. A freshly parsed panel
// may contain gaps (NaN entries) where a ticker has no record for a date;
// align_panel() removes them.
struct PricePanel {
  std::vector<std::string> dates;   // ISO-8601, strictly increasing
  std::vector<std::string> tickers; // first-appearance order
  MatrixD prices;                   // tickers x dates

  std::size_t n_tickers() const noexcept { return tickers.size(); }
  std::size_t n_dates() const noexcept { return dates.size(); }
  bool is_rectangular() const;

  bool operator==(const PricePanel&) const = default;
};

// Per-stock daily log returns r_a(t) = ln(S_a(t)/S_a(t-1)).
// dates[t] is the date of the closing price S_a(t), so there is one fewer
// column than in the source panel.
struct ReturnMatrix {
  std::vector<std::string> dates;
  std::vector<std::string> tickers;
  MatrixD returns; // tickers x days

  std::size_t n_stocks() const noexcept { return tickers.size(); }
  std::size_t n_days() const noexcept { return dates.size(); }
};

struct CsvColumns {
  std::string date = "date";
  std::string ticker = "ticker";
  std::string close = "close";
};

enum class MissingPolicy { intersect, forward_fill };

MissingPolicy parse_missing_policy(const std::string& name);
const char* to_string(MissingPolicy policy);

// Reads a long-format CSV (one row per observation) with a header row.
// Throws InputError naming the offending line for malformed rows,
// non-positive or non-finite prices, bad dates and duplicate (date, ticker)
// records.
PricePanel parse_price_csv(std::istream& in, const CsvColumns& columns = {});
PricePanel read_price_csv(const std::filesystem::path& path, const CsvColumns& columns = {});

void write_price_csv(std::ostream& out, const PricePanel& panel);

// intersect keeps only dates where every ticker has a price. forward_fill
// starts at the first date on which every ticker has been observed at least
// once and carries the last price across later gaps (each filled day then
// has a zero return for that ticker, which biases that day's volatility
// downwards).
PricePanel align_panel(const PricePanel& raw, MissingPolicy policy);

ReturnMatrix compute_returns(const PricePanel& panel);

// True for a well-formed YYYY-MM-DD calendar date.
bool is_iso_date(std::string_view text);

} // namespace obsvol
