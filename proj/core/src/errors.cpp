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

#include "emacprof/errors.hpp"

namespace emacprof {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::kSchemaError: return "SchemaError";
    case Errc::kShapeMismatch: return "ShapeMismatch";
    case Errc::kMaskViolation: return "MaskViolation";
    case Errc::kUnknownRef: return "UnknownRef";
    case Errc::kRateOutOfRange: return "RateOutOfRange";
    case Errc::kInvalidInput: return "InvalidInput";
    case Errc::kEmptyRaster: return "EmptyRaster";
    case Errc::kEmptyHistory: return "EmptyHistory";
    case Errc::kNonFiniteState: return "NonFiniteState";
    case Errc::kEmptyDataset: return "EmptyDataset";
    case Errc::kMissingRates: return "MissingRates";
    case Errc::kTraceNetMismatch: return "TraceNetMismatch";
    case Errc::kRankDeficient: return "RankDeficient";
    case Errc::kIllConditioned: return "IllConditioned";
    case Errc::kMissingMeasurement: return "MissingMeasurement";
    case Errc::kIoError: return "IoError";
  }
  return "Error";
}

}  // namespace emacprof
