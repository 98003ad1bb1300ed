// Copyright 2026 The mtend Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace mtend {

// Error categories double as CLI exit codes.
enum class ErrorCategory : int {
  kUsage = 1,
  kConfig = 2,
  kNumeric = 3,
  kIo = 4,
  kState = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(ErrorCategory::kConfig, what) {}
};

struct LayoutError : ConfigError {
  explicit LayoutError(const std::string& what) : ConfigError("invalid layout: " + what) {}
};

struct NumericError : Error {
  explicit NumericError(const std::string& what) : Error(ErrorCategory::kNumeric, what) {}
};

struct ShapeError : Error {
  explicit ShapeError(const std::string& what) : Error(ErrorCategory::kConfig, "shape mismatch: " + what) {}
};

struct IoError : Error {
  explicit IoError(const std::string& what) : Error(ErrorCategory::kIo, what) {}
};

struct InvalidActionError : Error {
  explicit InvalidActionError(const std::string& what) : Error(ErrorCategory::kUsage, what) {}
};

struct EpisodeFinishedError : Error {
  explicit EpisodeFinishedError(const std::string& what) : Error(ErrorCategory::kState, what) {}
};

struct StateError : Error {
  explicit StateError(const std::string& what) : Error(ErrorCategory::kState, what) {}
};

struct UsageError : Error {
  explicit UsageError(const std::string& what) : Error(ErrorCategory::kUsage, what) {}
};

}  // namespace mtend
