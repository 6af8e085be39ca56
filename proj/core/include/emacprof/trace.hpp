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

#ifndef EMACPROF_TRACE_HPP_
#define EMACPROF_TRACE_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include "emacprof/codec.hpp"

namespace emacprof {

// Activity record of one inference.
//
// feedforward_events[l] counts every accumulation actually performed into
// layer l: one per (presynaptic spike, realized target) pair for spike-driven
// layers, one per realized connection for layers computed from analog data.
// recurrent_events[l] counts own-layer spikes times the recurrent fanout,
// booked at the step the spike is emitted.
struct SpikeTrace {
  std::int64_t t_used = 0;
  bool input_analog = true;
  std::uint64_t input_spikes = 0;
  std::vector<std::vector<std::uint32_t>> counts;  // [layer][t - 1]
  std::vector<std::uint64_t> feedforward_events;
  std::vector<std::uint64_t> recurrent_events;
  std::optional<std::vector<Raster>> raster;  // [layer], on request

  std::size_t num_layers() const { return counts.size(); }
  std::uint64_t layer_spikes(std::size_t layer) const {
    std::uint64_t total = 0;
    for (auto c : counts[layer]) total += c;
    return total;
  }
  std::uint64_t synaptic_events() const {
    std::uint64_t total = 0;
    for (auto e : feedforward_events) total += e;
    for (auto e : recurrent_events) total += e;
    return total;
  }

  friend bool operator==(const SpikeTrace& a, const SpikeTrace& b) {
    return a.t_used == b.t_used && a.input_analog == b.input_analog &&
           a.input_spikes == b.input_spikes && a.counts == b.counts &&
           a.feedforward_events == b.feedforward_events &&
           a.recurrent_events == b.recurrent_events;
  }
};

}  // namespace emacprof

#endif  // EMACPROF_TRACE_HPP_
