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

// Test-only reference implementations. Everything here is written from the
// definitions with plain loops and shares no code with the library beyond
// the data types.

#ifndef EMACPROF_TESTS_SUPPORT_ORACLES_HPP_
#define EMACPROF_TESTS_SUPPORT_ORACLES_HPP_

#include <cstdint>
#include <vector>

#include "emacprof/codec.hpp"
#include "emacprof/netspec.hpp"
#include "emacprof/trace.hpp"

namespace emacprof::testing {

// Realized (output, input) connections of one layer, counted by visiting every
// output neuron and every kernel tap that lands inside the input.
std::int64_t enumerate_connections(const LayerSpec& layer);

// Per-presynaptic-neuron count of realized outgoing connections.
std::vector<std::int64_t> enumerate_fanout(const LayerSpec& layer);

// Sum of enumerate_connections over all layers.
std::int64_t brute_force_mac_count(const NetworkSpec& net);

// Feedforward events into every layer recomputed from a recorded raster:
// sum over timesteps and presynaptic spikes of the spiking neuron's fanout.
// Only meaningful for spike-driven layers; needs trace.raster.
std::vector<std::uint64_t> events_from_raster(const NetworkSpec& net,
                                              const EncodedInput& input,
                                              const SpikeTrace& trace);

struct OracleStep {
  double i = 0.0;
  double v = 0.0;
  bool spike = false;
};

// Direct iteration of the discrete LIF recurrence with a_syn = dt/tau_syn,
// a_mem = dt/tau_mem.
std::vector<OracleStep> iterate_lif(double i0, double v0,
                                    const std::vector<double>& drive,
                                    double a_syn, double a_mem, double v_th);

// Direct iteration of the non-leaky IFL recurrence.
std::vector<OracleStep> iterate_ifl(double i0, double v0,
                                    const std::vector<double>& drive,
                                    double v_th);

}  // namespace emacprof::testing

#endif  // EMACPROF_TESTS_SUPPORT_ORACLES_HPP_
