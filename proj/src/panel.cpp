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

#include "obsvol/panel.hpp"

#include "format.hpp"
#include "obsvol/error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <unordered_map>

namespace obsvol {

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

std::size_t column_index(const std::vector<std::string_view>& header, const std::string& name) {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) {
    throw InputError("missing column '" + name + "' in header", 1);
  }
  return static_cast<std::size_t>(it - header.begin());
}

struct Record {
  std::size_t date;
  std::size_t ticker;
  double price;
  std::size_t line;
};

} // namespace

bool PricePanel::is_rectangular() const {
  if (prices.rows() != tickers.size() || prices.cols() != dates.size()) return false;
  return std::all_of(prices.data().begin(), prices.data().end(),
                     [](double p) { return std::isfinite(p); });
}

MissingPolicy parse_missing_policy(const std::string& name) {
  if (name == "intersect") return MissingPolicy::intersect;
  if (name == "ffill" || name == "forward-fill") return MissingPolicy::forward_fill;
  throw InputError("unknown missing-data policy '" + name + "' (intersect|ffill)");
}

const char* to_string(MissingPolicy policy) {
  return policy == MissingPolicy::intersect ? "intersect" : "ffill";
}

bool is_iso_date(std::string_view s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
  for (std::size_t i : {0, 1, 2, 3, 5, 6, 8, 9}) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  const auto num = [&](std::size_t pos, std::size_t len) {
    int v = 0;
    for (std::size_t i = pos; i < pos + len; ++i) v = v * 10 + (s[i] - '0');
    return v;
  };
  using namespace std::chrono;
  const year_month_day ymd{year{num(0, 4)}, month{static_cast<unsigned>(num(5, 2))},
                           day{static_cast<unsigned>(num(8, 2))}};
  return ymd.ok();
}

PricePanel parse_price_csv(std::istream& in, const CsvColumns& columns) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("empty input: expected a header row");
  if (line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);

  const auto header = detail::split_csv(line);
  const std::size_t date_col = column_index(header, columns.date);
  const std::size_t ticker_col = column_index(header, columns.ticker);
  const std::size_t close_col = column_index(header, columns.close);
  const std::size_t n_fields = header.size();

  PricePanel panel;
  std::unordered_map<std::string, std::size_t> ticker_ids;
  std::vector<std::string> raw_dates;
  std::vector<Record> records;

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split_csv(line);
    if (fields.size() != n_fields) {
      throw InputError("expected " + std::to_string(n_fields) + " fields, found " +
                           std::to_string(fields.size()),
                       line_no);
    }
    const auto date = fields[date_col];
    if (!is_iso_date(date)) {
      throw InputError("unparseable date '" + std::string(date) + "' (want YYYY-MM-DD)", line_no);
    }
    const std::string ticker(fields[ticker_col]);
    if (ticker.empty()) throw InputError("empty ticker", line_no);
    double price = 0.0;
    if (!detail::parse_double(fields[close_col], price) || !std::isfinite(price)) {
      throw InputError("unparseable close '" + std::string(fields[close_col]) + "'", line_no);
    }
    if (price <= 0.0) {
      throw InputError("non-positive close " + std::string(fields[close_col]) + " for " + ticker,
                       line_no);
    }

    const auto [it, inserted] = ticker_ids.try_emplace(ticker, panel.tickers.size());
    if (inserted) panel.tickers.push_back(ticker);
    raw_dates.emplace_back(date);
    records.push_back({raw_dates.size() - 1, it->second, price, line_no});
  }
  if (records.empty()) throw InputError("no data rows");

  panel.dates = raw_dates;
  std::sort(panel.dates.begin(), panel.dates.end());
  panel.dates.erase(std::unique(panel.dates.begin(), panel.dates.end()), panel.dates.end());

  panel.prices = MatrixD(panel.tickers.size(), panel.dates.size(), kMissing);
  for (const auto& rec : records) {
    const auto col = static_cast<std::size_t>(
        std::lower_bound(panel.dates.begin(), panel.dates.end(), raw_dates[rec.date]) -
        panel.dates.begin());
    double& cell = panel.prices(rec.ticker, col);
    if (!std::isnan(cell)) {
      throw InputError("duplicate record for " + panel.tickers[rec.ticker] + " on " +
                           panel.dates[col],
                       rec.line);
    }
    cell = rec.price;
  }
  return panel;
}

PricePanel read_price_csv(const std::filesystem::path& path, const CsvColumns& columns) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  return parse_price_csv(in, columns);
}

void write_price_csv(std::ostream& out, const PricePanel& panel) {
  out << "date,ticker,close\n";
  for (std::size_t t = 0; t < panel.n_dates(); ++t) {
    for (std::size_t a = 0; a < panel.n_tickers(); ++a) {
      const double p = panel.prices(a, t);
      if (std::isnan(p)) continue;
      out << panel.dates[t] << ',' << panel.tickers[a] << ',' << detail::format_double(p) << '\n';
    }
  }
}

PricePanel align_panel(const PricePanel& raw, MissingPolicy policy) {
  const std::size_t n = raw.n_tickers();
  const std::size_t n_dates = raw.n_dates();
  if (n == 0) throw InputError("panel has no tickers");
  if (n_dates < 2) throw InputError("panel needs at least 2 dates");
  if (raw.prices.rows() != n || raw.prices.cols() != n_dates) {
    throw InputError("price matrix does not match dates/tickers");
  }

  std::size_t first_common = 0;
  for (std::size_t a = 0; a < n; ++a) {
    const auto row = raw.prices.row(a);
    const auto it = std::find_if(row.begin(), row.end(), [](double p) { return !std::isnan(p); });
    if (it == row.end()) throw InputError("ticker " + raw.tickers[a] + " has no observations");
    first_common = std::max(first_common, static_cast<std::size_t>(it - row.begin()));
  }

  std::vector<std::size_t> keep;
  if (policy == MissingPolicy::intersect) {
    for (std::size_t t = 0; t < n_dates; ++t) {
      bool all = true;
      for (std::size_t a = 0; a < n && all; ++a) all = !std::isnan(raw.prices(a, t));
      if (all) keep.push_back(t);
    }
  } else {
    for (std::size_t t = first_common; t < n_dates; ++t) keep.push_back(t);
  }
  if (keep.size() < 2) {
    throw InputError("aligned panel has " + std::to_string(keep.size()) +
                     " date(s); at least 2 are needed");
  }

  PricePanel out;
  out.tickers = raw.tickers;
  out.dates.reserve(keep.size());
  for (auto t : keep) out.dates.push_back(raw.dates[t]);
  out.prices = MatrixD(n, keep.size());
  for (std::size_t a = 0; a < n; ++a) {
    double last = kMissing;
    // Seed the carry with the latest observation at or before the first kept date.
    for (std::size_t t = 0; t <= keep.front(); ++t) {
      if (!std::isnan(raw.prices(a, t))) last = raw.prices(a, t);
    }
    for (std::size_t j = 0; j < keep.size(); ++j) {
      const double p = raw.prices(a, keep[j]);
      if (!std::isnan(p)) last = p;
      out.prices(a, j) = last;
    }
  }
  return out;
}

ReturnMatrix compute_returns(const PricePanel& panel) {
  if (panel.n_tickers() == 0) throw InputError("panel has no tickers");
  if (panel.n_dates() < 2) throw InputError("panel needs at least 2 dates");
  if (!panel.is_rectangular()) throw InputError("panel has gaps; align it first");

  const std::size_t n = panel.n_tickers();
  const std::size_t n_days = panel.n_dates() - 1;
  ReturnMatrix rm;
  rm.tickers = panel.tickers;
  rm.dates.assign(panel.dates.begin() + 1, panel.dates.end());
  rm.returns = MatrixD(n, n_days);
  for (std::size_t a = 0; a < n; ++a) {
    const auto s = panel.prices.row(a);
    for (std::size_t t = 0; t < n_days; ++t) {
      if (!(s[t] > 0.0) || !(s[t + 1] > 0.0)) {
        throw InputError("non-positive price for " + panel.tickers[a] + " near " + panel.dates[t]);
      }
      rm.returns(a, t) = std::log(s[t + 1] / s[t]);
    }
  }
  return rm;
}

} // namespace obsvol
