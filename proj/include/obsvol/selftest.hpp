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

#include "obsvol/report.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace obsvol {

enum class SelftestMode { quick, full };

struct SelftestCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SelftestResult {
  std::vector<SelftestCheck> checks;

  bool passed() const;
  std::string summary() const;
};

// End-to-end oracle run: synthesize a panel with a known volatility factor,
// write and re-read it as CSV, run the battery and check the recovered
// quantities. quick uses T = 2000 and 200 bootstrap replicates, full uses
// T = 10000 and 1000.
SelftestResult run_selftest(SelftestMode mode, std::uint64_t seed = 7,
                            const KFormula& k_formula = {});

} // namespace obsvol
