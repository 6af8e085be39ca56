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

#ifndef EMACPROF_TOOLS_CLI_HPP_
#define EMACPROF_TOOLS_CLI_HPP_

namespace emacprof::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumeric = 3;
inline constexpr int kExitCalibration = 4;

int run(int argc, char** argv);

}  // namespace emacprof::cli

#endif  // EMACPROF_TOOLS_CLI_HPP_
