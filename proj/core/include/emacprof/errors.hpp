/* Copyright 2026 The emacprof Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef EMACPROF_ERRORS_HPP_
#define EMACPROF_ERRORS_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace emacprof {

enum class Errc {
  // netspec
  kSchemaError,
  kShapeMismatch,
  kMaskViolation,
  kUnknownRef,
  // codec
  kRateOutOfRange,
  kInvalidInput,
  kEmptyRaster,
  kEmptyHistory,
  // engine
  kNonFiniteState,
  kEmptyDataset,
  // emac
  kMissingRates,
  kTraceNetMismatch,
  // calib
  kRankDeficient,
  kIllConditioned,
  kMissingMeasurement,
  // generic I/O
  kIoError,
};

std::string_view errc_name(Errc code);

// All library failures are reported through this one exception type; the
// code tells callers (and the CLI exit-code mapping) which contract failed.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace emacprof

#endif  // EMACPROF_ERRORS_HPP_
