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
#include "obsvol/report.hpp"
#include "obsvol/selftest.hpp"
#include "obsvol/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <doctest.h>

using namespace obsvol;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("obsvol_test_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

AnalyzeOptions small_options() {
  AnalyzeOptions o;
  o.tau_max = 100;
  o.n_boot = 100;
  o.ks_null_replicates = 200;
  return o;
}

fs::path small_synth(const fs::path& dir, std::size_t n_stocks = 12, std::size_t n_days = 1500) {
  SynthConfig cfg;
  cfg.n_stocks = n_stocks;
  cfg.n_days = n_days;
  cfg.seed = 9;
  run_synth(cfg, dir);
  return dir / "prices.csv";
}

} // namespace

TEST_SUITE("report") {

TEST_CASE("curve labels and file stems") {
  const auto& labels = curve_labels();
  REQUIRE(labels.size() == 9);
  CHECK(labels[0] == "sigma,sigma");
  CHECK(curve_file_stem("|r|,|r|") == "absr_absr");
  CHECK(curve_file_stem("|omega|,|omega|") == "absomega_absomega");
  CHECK(curve_file_stem("omega,sigma") == "omega_sigma");
}

TEST_CASE("sha256 of a known message") {
  TempDir d("sha");
  write_text(d.path / "abc.txt", "abc");
  CHECK(sha256_hex(d.path / "abc.txt") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK_THROWS_AS(sha256_hex(d.path / "missing"), InputError);
}

TEST_CASE("analysis of a synthetic panel") {
  TempDir d("analyze");
  const auto input = small_synth(d.path / "synth");
  const auto rep = run_analyze(input, small_options(), d.path / "out");

  CHECK(rep.n_stocks == 12);
  CHECK(rep.n_days == 1500);
  CHECK(rep.curves.size() == 9);
  CHECK(rep.k == compute_k(rep.sigma_moments, rep.abs_omega_sq_ratio_used));
  CHECK(rep.identities.max_product_error <= 1e-12);
  CHECK(rep.identities.second_moment_gap <= 1e-12);
  CHECK(rep.identities.equal_weight_bound_ok);
  CHECK(rep.provenance.input_sha256 == sha256_hex(input));
  CHECK(rep.provenance.options.at("seed") == 1);
  CHECK(rep.warnings.empty());
  for (const auto& c : rep.curves) {
    CHECK(c.values.size() == 101);
    CHECK(c.has_band());
    CHECK(fs::exists(d.path / "out" / ("curve_" + curve_file_stem(c.label) + ".csv")));
  }
  for (const char* f : {"report.json", "rescaled.csv", "histogram.csv"}) CHECK(fs::exists(d.path / "out" / f));

  // the per-curve csv carries lag 0 .. tau_max plus a header
  std::ifstream in(d.path / "out" / "curve_sigma_sigma.csv");
  std::string line;
  int lines = 0;
  std::getline(in, line);
  CHECK(line == "lag,value,band_low,band_high");
  while (std::getline(in, line)) ++lines;
  CHECK(lines == 101);
}

TEST_CASE("report.json parses back to the same report") {
  TempDir d("json");
  const auto input = small_synth(d.path / "synth");
  const auto rep = run_analyze(input, small_options(), d.path / "out");
  const auto parsed = report_from_json(nlohmann::json::parse(slurp(d.path / "out" / "report.json")));
  CHECK(parsed == rep);
  CHECK(report_from_json(report_to_json(rep)) == rep);
}

TEST_CASE("one constituent") {
  TempDir d("single");
  const auto input = small_synth(d.path / "synth", 1, 600);
  const auto rep = run_analyze(input, small_options(), d.path / "out");
  CHECK(rep.uniformity.degenerate);
  CHECK_FALSE(rep.uniformity_consistent);
  CHECK(rep.identities.max_abs_omega == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
  CHECK(rep.omega_moments.mean_abs == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
  CHECK(rep.curve("|omega|,|omega|")->degenerate);
  bool flagged = false;
  for (const auto& w : rep.warnings) flagged = flagged || w.starts_with("uniformity");
  CHECK(flagged);
  const auto j = nlohmann::json::parse(slurp(d.path / "out" / "report.json"));
  CHECK(j.at("uniformity").at("degenerate") == true);
}

TEST_CASE("malformed input leaves no output behind") {
  TempDir d("bad");
  write_text(d.path / "bad.csv", "date,ticker,close\n2020-01-02,A,10\n2020-01-03,A,zero\n");
  CHECK_THROWS_AS(run_analyze(d.path / "bad.csv", small_options(), d.path / "out"), InputError);
  CHECK_FALSE(fs::exists(d.path / "out"));
  CHECK_THROWS_AS(run_analyze(d.path / "missing.csv", small_options(), d.path / "out"), InputError);
  CHECK_FALSE(fs::exists(d.path / "out"));
}

TEST_CASE("statistical preconditions surface as StatsError") {
  TempDir d("short");
  const auto input = small_synth(d.path / "synth", 5, 150);
  auto o = small_options();
  CHECK_THROWS_AS(run_analyze(input, o, d.path / "out"), StatsError); // tau 100 >= T/2
  o.tau_max = 20;
  o.block_len = 500;
  CHECK_THROWS_AS(run_analyze(input, o, d.path / "out"), StatsError);
  CHECK_FALSE(fs::exists(d.path / "out"));
}

TEST_CASE("identical inputs and seed give identical bytes") {
  TempDir d("det");
  SynthConfig cfg;
  cfg.n_stocks = 20;
  cfg.n_days = 1200;
  cfg.seed = 7;
  run_synth(cfg, d.path / "s1");
  run_synth(cfg, d.path / "s2");
  for (const char* f : {"prices.csv", "sigma_true.csv"}) CHECK(slurp(d.path / "s1" / f) == slurp(d.path / "s2" / f));

  const auto o = small_options();
  run_analyze(d.path / "s1" / "prices.csv", o, d.path / "a1");
  run_analyze(d.path / "s1" / "prices.csv", o, d.path / "a2");
  int files = 0;
  for (const auto& e : fs::directory_iterator(d.path / "a1")) {
    ++files;
    CHECK(slurp(e.path()) == slurp(d.path / "a2" / e.path().filename()));
  }
  CHECK(files == 12);
}

TEST_CASE("weights") {
  TempDir d("weights");
  write_text(d.path / "p.csv", "date,ticker,close\n"
                               "2020-01-01,A,10\n2020-01-01,B,30\n"
                               "2020-01-02,A,11\n2020-01-02,B,29\n"
                               "2020-01-03,A,12\n2020-01-03,B,31\n");
  write_text(d.path / "w.csv", "date,ticker,weight\n2020-01-02,A,1\n2020-01-02,B,3\n"
                               "2020-01-03,A,1\n2020-01-03,B,1\n");
  std::ifstream in(d.path / "p.csv");
  const auto raw = parse_price_csv(in);
  AnalyzeOptions o;
  o.weights = "nonsense";
  CHECK_THROWS_AS(analyze_panel(raw, o), InputError);
  o.weights = "explicit:" + (d.path / "nope.csv").string();
  CHECK_THROWS_AS(analyze_panel(raw, o), InputError);
}

TEST_CASE("price weights on a synthetic panel") {
  TempDir d("pw");
  const auto input = small_synth(d.path / "synth");
  auto o = small_options();
  o.weights = "price";
  const auto rep = run_analyze(input, o, d.path / "out");
  CHECK(rep.weights == "price");
  CHECK(rep.identities.max_product_error <= 1e-12);
}

TEST_CASE("rescale discrepancy shrinks as the sample grows") {
  // median over three seeds at T = 10^3, 10^4, 10^5
  auto median_discrepancy = [](std::size_t n_days) {
    std::vector<double> d;
    for (std::uint64_t seed = 21; seed <= 23; ++seed) {
      SynthConfig cfg;
      cfg.n_days = n_days;
      cfg.seed = seed;
      const auto p = gen_market(cfg);
      AnalyzeOptions o;
      o.n_boot = 0;
      o.ks_null_replicates = 0;
      d.push_back(analyze_series(build_index_series(p.returns, WeightScheme::equal()), 65, o)
                      .rescale.max_discrepancy);
    }
    std::sort(d.begin(), d.end());
    return d[1];
  };
  const double small = median_discrepancy(1000);
  const double mid = median_discrepancy(10000);
  const double large = median_discrepancy(100000);
  MESSAGE("median max discrepancy " << small << " > " << mid << " > " << large);
  CHECK(small > mid);
  CHECK(mid > large);
}

} // TEST_SUITE

TEST_SUITE("selftest") {

TEST_CASE("quick selftest passes") {
  const auto r = run_selftest(SelftestMode::quick);
  MESSAGE(r.summary());
  CHECK(r.passed());
  CHECK(r.checks.size() >= 10);
}

TEST_CASE("the misprinted k formula is caught") {
  const auto r = run_selftest(SelftestMode::quick, 7, [](const MomentSummary& m, double ratio) {
    return compute_k_misprinted(m, ratio);
  });
  CHECK_FALSE(r.passed());
  bool flagged = false;
  for (const auto& c : r.checks) flagged = flagged || (c.name == "k_published_moments" && !c.passed);
  CHECK(flagged);
}

} // TEST_SUITE
