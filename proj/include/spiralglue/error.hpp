// Copyright 2026-present the spiralglue project
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
#include <string_view>

namespace spiralglue {

enum class ErrorKind {
  kInvalidArgument,
  kDimensionMismatch,
  kNonFinite,
  kOverflow,
  kOutOfScheduleRange,
  kCertificationFailed,
  kNotStabilized,
  kBankExhausted,
  kNonPositiveLowerBound,
  kBothZero,
  kBoundViolated,
  kConfig,
};

inline std::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kDimensionMismatch: return "DimensionMismatch";
    case ErrorKind::kNonFinite: return "NonFinite";
    case ErrorKind::kOverflow: return "Overflow";
    case ErrorKind::kOutOfScheduleRange: return "OutOfScheduleRange";
    case ErrorKind::kCertificationFailed: return "CertificationFailed";
    case ErrorKind::kNotStabilized: return "NotStabilized";
    case ErrorKind::kBankExhausted: return "BankExhausted";
    case ErrorKind::kNonPositiveLowerBound: return "NonPositiveLowerBound";
    case ErrorKind::kBothZero: return "BothZero";
    case ErrorKind::kBoundViolated: return "BoundViolated";
    case ErrorKind::kConfig: return "ConfigError";
  }
  return "Unknown";
}

//! Base exception for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string &what)
      : std::runtime_error(std::string(ErrorKindName(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

namespace detail {

[[noreturn]] inline void Fail(ErrorKind kind, const std::string &what) {
  throw Error(kind, what);
}

inline void Require(bool cond, ErrorKind kind, const std::string &what) {
  if (!cond) Fail(kind, what);
}

}  // namespace detail
}  // namespace spiralglue
