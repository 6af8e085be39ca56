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

#ifndef EMACPROF_REPORT_HPP_
#define EMACPROF_REPORT_HPP_

#include <cstdint>
#include <string>

#include "emacprof/engine.hpp"
#include "emacprof/netspec.hpp"

namespace emacprof {

// Shortest representation that round-trips; integral values print without a
// decimal point.
std::string format_number(double value);

// Fixed three decimals with trailing zeros stripped, e.g. 0.667, 1, 3.333.
std::string format_rounded(double value);

// Per-layer structural table plus MAC count and static update cost.
std::string inspect_report(const NetworkSpec& net);

// Run metadata echoed into profile reports.
struct ProfileInfo {
  std::string network;
  std::uint64_t seed = 0;
  bool encoder_per_step = false;
  std::string encoding;
};

// Mean/std of every energy component for both methods side by side, the
// per-layer breakdown, (S, U) means and the failing samples.
std::string profile_json(const NetworkSpec& net, const AggregateStats& stats,
                         const ProfileInfo& info);

// layer,name,kind,n_n,spikes_mean,spikes_std
std::string spikes_csv(const NetworkSpec& net, const AggregateStats& stats);

// sample,t_used,class,fallback
std::string latency_csv(const AggregateStats& stats);

// method,layer,component,mean,std in long form; layer "total" holds sums.
std::string energy_csv(const NetworkSpec& net, const AggregateStats& stats);

// One report as JSON mirroring EnergyReport, and as long-form CSV
// `layer,component,emac` with a closing `total` block.
std::string energy_report_json(const NetworkSpec& net, const EnergyReport& report);
std::string energy_report_csv(const NetworkSpec& net, const EnergyReport& report);

// layer,t,spike_count over the full (layer, t) grid.
std::string trace_csv(const SpikeTrace& trace);

// layer,neuron,t for every spike; requires a recorded raster.
std::string raster_csv(const SpikeTrace& trace);

std::string trace_summary_json(const NetworkSpec& net,
                               const InferenceResult& result);

}  // namespace emacprof

#endif  // EMACPROF_REPORT_HPP_
