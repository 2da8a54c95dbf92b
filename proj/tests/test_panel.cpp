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

#include "obsvol/error.hpp"
#include "obsvol/panel.hpp"
#include "obsvol/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>

#include <doctest.h>

using namespace obsvol;

namespace {

PricePanel parse(const std::string& text, const CsvColumns& cols = {}) {
  std::istringstream in(text);
  return parse_price_csv(in, cols);
}

// B has no record on the middle date.
const char* kGapCsv =
    "date,ticker,close\n"
    "2020-01-02,A,10\n"
    "2020-01-02,B,20\n"
    "2020-01-03,A,11\n"
    "2020-01-06,A,12\n"
    "2020-01-06,B,22\n";

} // namespace

TEST_SUITE("panel") {

TEST_CASE("three rows for one ticker") {
  const auto p = parse("date,ticker,close\n2020-01-02,X,100\n2020-01-03,X,110\n2020-01-06,X,99\n");
  CHECK(p.n_tickers() == 1);
  CHECK(p.n_dates() == 3);
  CHECK(p.prices(0, 0) == 100.0);
  CHECK(p.prices(0, 1) == 110.0);
  CHECK(p.prices(0, 2) == 99.0);
  CHECK(p.is_rectangular());
}

TEST_CASE("rows arrive unsorted, columns in any order") {
  const auto p = parse("close,ticker,date\n5,B,2020-01-03\n7,A,2020-01-02\n6,B,2020-01-02\n"
                       "8,A,2020-01-03\n");
  REQUIRE(p.dates == std::vector<std::string>{"2020-01-02", "2020-01-03"});
  REQUIRE(p.tickers == std::vector<std::string>{"B", "A"});
  CHECK(p.prices(0, 0) == 6.0);
  CHECK(p.prices(1, 1) == 8.0);
}

TEST_CASE("custom column names") {
  CsvColumns cols{"day", "sym", "px"};
  const auto p = parse("sym,day,px\nQ,2021-03-01,1.5\nQ,2021-03-02,1.25\n", cols);
  CHECK(p.prices(0, 1) == 1.25);
  CHECK_THROWS_AS(parse("sym,day,close\nQ,2021-03-01,1\n", cols), InputError);
}

TEST_CASE("zero close is rejected with its line number") {
  try {
    parse("date,ticker,close\n2020-01-02,A,10\n2020-01-03,A,0\n");
    FAIL("expected an error");
  } catch (const InputError& e) {
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("malformed rows") {
  CHECK_THROWS_AS(parse(""), InputError);
  CHECK_THROWS_AS(parse("date,ticker,close\n"), InputError);
  CHECK_THROWS_AS(parse("date,ticker,close\n2020-01-02,A\n"), InputError);
  CHECK_THROWS_AS(parse("date,ticker,close\n2020-13-02,A,1\n"), InputError);
  CHECK_THROWS_AS(parse("date,ticker,close\n2020-01-02,A,abc\n"), InputError);
  CHECK_THROWS_AS(parse("date,ticker,close\n2020-01-02,A,-1\n"), InputError);
  CHECK_THROWS_AS(parse("date,ticker,close\n2020-01-02,A,nan\n"), InputError);
  CHECK_THROWS_AS(parse("date,ticker,close\n2020-01-02,A,1\n2020-01-02,A,2\n"), InputError);
  CHECK_THROWS_AS(parse("date,ticker\n2020-01-02,A\n"), InputError);
}

TEST_CASE("iso dates") {
  CHECK(is_iso_date("2020-02-29"));
  CHECK_FALSE(is_iso_date("2019-02-29"));
  CHECK_FALSE(is_iso_date("2020-1-02"));
  CHECK_FALSE(is_iso_date("20200102"));
}

TEST_CASE("a missing middle date is kept as a gap") {
  const auto p = parse(kGapCsv);
  REQUIRE(p.n_dates() == 3);
  CHECK(std::isnan(p.prices(1, 1)));
  CHECK_FALSE(p.is_rectangular());
  CHECK_THROWS_AS(compute_returns(p), InputError);
}

TEST_CASE("intersect drops the gap date") {
  const auto a = align_panel(parse(kGapCsv), MissingPolicy::intersect);
  CHECK(a.dates == std::vector<std::string>{"2020-01-02", "2020-01-06"});
  CHECK(a.is_rectangular());
  CHECK(a.prices(0, 1) == 12.0);
}

TEST_CASE("forward fill carries the previous close") {
  const auto a = align_panel(parse(kGapCsv), MissingPolicy::forward_fill);
  REQUIRE(a.n_dates() == 3);
  CHECK(a.prices(1, 1) == a.prices(1, 0));
  CHECK(a.is_rectangular());
}

TEST_CASE("forward fill starts once every ticker has traded") {
  const auto raw = parse("date,ticker,close\n2020-01-02,A,1\n2020-01-03,A,2\n2020-01-03,B,5\n"
                         "2020-01-06,A,3\n2020-01-07,A,4\n2020-01-07,B,6\n");
  const auto a = align_panel(raw, MissingPolicy::forward_fill);
  CHECK(a.dates == std::vector<std::string>{"2020-01-03", "2020-01-06", "2020-01-07"});
  CHECK(a.prices(1, 1) == 5.0);
}

TEST_CASE("rectangular input is unchanged by either policy") {
  const auto p = parse("date,ticker,close\n2020-01-02,A,1\n2020-01-02,B,2\n2020-01-03,A,3\n"
                       "2020-01-03,B,4\n");
  CHECK(align_panel(p, MissingPolicy::intersect) == p);
  CHECK(align_panel(p, MissingPolicy::forward_fill) == p);
}

TEST_CASE("alignment preconditions") {
  CHECK_THROWS_AS(align_panel(parse("date,ticker,close\n2020-01-02,A,1\n"), MissingPolicy::intersect),
                  InputError);
  // A and B never trade on the same day.
  const auto disjoint = parse("date,ticker,close\n2020-01-02,A,1\n2020-01-03,B,1\n2020-01-06,A,2\n");
  CHECK_THROWS_AS(align_panel(disjoint, MissingPolicy::intersect), InputError);
}

TEST_CASE("missing policy names") {
  CHECK(parse_missing_policy("intersect") == MissingPolicy::intersect);
  CHECK(parse_missing_policy("ffill") == MissingPolicy::forward_fill);
  CHECK(parse_missing_policy("forward-fill") == MissingPolicy::forward_fill);
  CHECK_THROWS_AS(parse_missing_policy("drop"), InputError);
}

TEST_CASE("log returns") {
  auto one = [](double a, double b) {
    PricePanel p{{"2020-01-02", "2020-01-03"}, {"X"}, MatrixD(1, 2)};
    p.prices(0, 0) = a;
    p.prices(0, 1) = b;
    return compute_returns(p);
  };
  CHECK(one(100, 100).returns(0, 0) == 0.0);
  // ln(1.1) = 0.09531017980432486...
  CHECK(one(100, 110).returns(0, 0) == doctest::Approx(0.0953101798043249).epsilon(1e-15));

  const auto rm = compute_returns(parse("date,ticker,close\n2020-01-02,A,3\n2020-01-02,B,3\n"
                                        "2020-01-03,A,4\n2020-01-03,B,4\n"));
  CHECK(rm.dates == std::vector<std::string>{"2020-01-03"});
  CHECK(rm.returns(0, 0) == rm.returns(1, 0));
}

TEST_CASE("property: cumulative returns rebuild the price path") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(seed, 0);
    const std::size_t n = 2 + rng.below(400);
    PricePanel p;
    p.tickers = {"A", "B"};
    for (std::size_t t = 0; t < n; ++t) p.dates.push_back(std::to_string(t));
    p.prices = MatrixD(2, n);
    for (std::size_t a = 0; a < 2; ++a) {
      double s = rng.uniform(1.0, 500.0);
      for (std::size_t t = 0; t < n; ++t) {
        p.prices(a, t) = s;
        s *= std::exp(0.03 * rng.normal());
      }
    }
    const auto rm = compute_returns(p);
    for (std::size_t a = 0; a < 2; ++a) {
      double cum = 0.0;
      for (std::size_t t = 0; t + 1 < n; ++t) {
        cum += rm.returns(a, t);
        const double rebuilt = p.prices(a, 0) * std::exp(cum);
        REQUIRE(std::fabs(rebuilt / p.prices(a, t + 1) - 1.0) < 1e-10);
      }
    }

    // Scaling one ticker's prices leaves its returns alone.
    PricePanel q = p;
    const double c = rng.uniform(0.01, 100.0);
    for (std::size_t t = 0; t < n; ++t) q.prices(1, t) *= c;
    const auto rq = compute_returns(q);
    for (std::size_t t = 0; t + 1 < n; ++t) {
      REQUIRE(std::fabs(rq.returns(1, t) - rm.returns(1, t)) < 1e-12);
    }
  }
}

TEST_CASE("property: intersect keeps a subset, ffill keeps everything after the first common date") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    Rng rng(seed, 1);
    const std::size_t n = 5 + rng.below(30);
    std::ostringstream csv;
    csv << "date,ticker,close\n";
    std::vector<std::string> all;
    for (std::size_t t = 0; t < n; ++t) {
      char buf[48];
      std::snprintf(buf, sizeof buf, "2020-%02zu-%02zu", 1 + t / 28, 1 + t % 28);
      all.push_back(buf);
      for (const char* tk : {"A", "B", "C"}) {
        if (t == 0 || t + 1 == n || tk[0] == 'A' || rng.uniform01() < 0.8) {
          csv << buf << ',' << tk << ',' << rng.uniform(1, 9) << '\n';
        }
      }
    }
    std::istringstream in(csv.str());
    const auto raw = parse_price_csv(in);
    REQUIRE(raw.dates == all);
    const auto inter = align_panel(raw, MissingPolicy::intersect);
    for (const auto& d : inter.dates) {
      CHECK(std::find(all.begin(), all.end(), d) != all.end());
    }
    const auto ff = align_panel(raw, MissingPolicy::forward_fill);
    CHECK(ff.dates == all); // every ticker trades on the first date here
    CHECK(ff.is_rectangular());
  }
}

TEST_CASE("csv write then read is lossless") {
  Rng rng(5, 5);
  PricePanel p;
  p.tickers = {"S001", "S002", "S003"};
  for (int d = 2; d <= 9; ++d) p.dates.push_back("1999-03-0" + std::to_string(d));
  p.prices = MatrixD(3, p.dates.size());
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t t = 0; t < p.dates.size(); ++t) p.prices(a, t) = std::exp(rng.normal());
  std::stringstream s;
  write_price_csv(s, p);
  CHECK(parse_price_csv(s) == p);
}

TEST_CASE("byte order mark and quoted fields") {
  const auto p = parse("\xEF\xBB\xBF\"date\",\"ticker\",\"close\"\r\n\"2020-01-02\",\"A\",\"3.5\"\r\n"
                       "2020-01-03,A,4\r\n");
  CHECK(p.n_dates() == 2);
  CHECK(p.prices(0, 0) == 3.5);
}

} // TEST_SUITE
