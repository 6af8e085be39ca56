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

#ifndef EMACPROF_ENGINE_HPP_
#define EMACPROF_ENGINE_HPP_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "emacprof/codec.hpp"
#include "emacprof/emac.hpp"
#include "emacprof/netspec.hpp"
#include "emacprof/trace.hpp"

namespace emacprof {

struct InferenceOptions {
  std::optional<Coding> coding;        // overrides the manifest
  std::optional<int> max_timesteps;    // overrides the manifest
  bool record_raster = false;
  EnergyOptions energy;
};

struct InferenceResult {
  Decision decision;
  SpikeTrace trace;
  EnergyReport analytic;
  EnergyReport exact;
};

// Time-stepped simulator for one network. Construction precomputes weight
// layouts; run() is const and may be called concurrently.
//
// Within a timestep layers are swept in order and layer l consumes the
// spikes layer l-1 emitted in the same step. Recurrent input comes from the
// layer's own spikes of the previous step.
class Engine {
 public:
  explicit Engine(const NetworkSpec& net);
  ~Engine();
  Engine(Engine&&) noexcept;
  Engine& operator=(Engine&&) noexcept;

  InferenceResult run(const EncodedInput& input,
                      const InferenceOptions& options = {}) const;

  const NetworkSpec& network() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

InferenceResult run_inference(const NetworkSpec& net, const EncodedInput& input,
                              const InferenceOptions& options = {});

struct Stat {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
};

// Population mean/std, accumulated in index order.
Stat summarize(const std::vector<double>& values);

struct LayerStats {
  Stat syn, upd, rec, tot, spikes;
};

struct MethodStats {
  Stat syn, upd, rec, pool, tot;
  std::vector<LayerStats> layers;
};

struct SampleFailure {
  std::size_t index = 0;
  std::string message;
};

struct AggregateStats {
  std::vector<std::size_t> sample_index;  // parallel to results
  std::vector<InferenceResult> results;
  std::vector<SampleFailure> failures;
  MethodStats analytic;
  MethodStats exact;
  Stat total_spikes;       // over neuron-bearing layers
  Stat t_used;
  Stat synaptic_events;    // feedforward + recurrent, per inference
  Stat neuron_updates;     // t_used * spiking neurons, per inference
};

// Runs every sample (up to `jobs` concurrently) and aggregates statistics in
// sample order. Samples whose state goes non-finite are recorded in
// `failures` and excluded from the statistics.
AggregateStats run_dataset(const NetworkSpec& net,
                           const std::vector<EncodedInput>& samples,
                           const InferenceOptions& options = {},
                           unsigned jobs = 1);

// Number of neurons updated each timestep (spiking neuron layers only).
std::int64_t spiking_neuron_count(const NetworkSpec& net);

}  // namespace emacprof

#endif  // EMACPROF_ENGINE_HPP_
