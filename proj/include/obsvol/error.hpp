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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace obsvol {

// Bad input data or malformed configuration (CLI exit code 2).
class InputError : public std::runtime_error {
public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
  InputError(const std::string& what, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  // 1-based source line, 0 when not tied to a line.
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_ = 0;
};

// Data is well formed but a statistical precondition does not hold
// (zero variance, too few samples, lag range too large; exit code 3).
class StatsError : public std::runtime_error {
public:
  explicit StatsError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace obsvol
