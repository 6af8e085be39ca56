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

#ifndef EMACPROF_NETSPEC_HPP_
#define EMACPROF_NETSPEC_HPP_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "emacprof/neuron_model.hpp"
#include "emacprof/weights.hpp"

namespace emacprof {

// (N,) for flat layers, (C,H,W) for spatial ones.
using Shape = std::vector<std::int64_t>;

std::int64_t num_elements(const Shape& shape);
std::string to_string(const Shape& shape);

enum class LayerKind {
  kDense,
  kConv2D,
  kLocallyConnected,
  kRecurrentDense,
  kMaxPool2D,
  kFlatten,
};

std::string_view to_string(LayerKind kind);
std::optional<LayerKind> layer_kind_from_string(std::string_view name);

enum class Coding { kRate, kRoc };

std::string_view to_string(Coding coding);
std::optional<Coding> coding_from_string(std::string_view name);

struct Padding {
  enum class Mode { kValid, kZero };
  Mode mode = Mode::kValid;
  int pad = 0;

  int amount() const { return mode == Mode::kZero ? pad : 0; }
  friend bool operator==(const Padding&, const Padding&) = default;
};

struct LayerSpec {
  std::string name;
  LayerKind kind = LayerKind::kDense;
  Shape input_shape;
  Shape output_shape;
  std::array<int, 2> kernel{1, 1};
  std::array<int, 2> stride{1, 1};
  Padding padding;
  // Key into NetworkSpec::neuron_models; empty for MaxPool2D and Flatten.
  std::string neuron_model;
  std::string weights_ref;
  std::optional<std::string> recurrent_weights_ref;

  bool has_neurons() const {
    return kind != LayerKind::kMaxPool2D && kind != LayerKind::kFlatten;
  }

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

struct NetworkSpec {
  int version = 1;
  Coding coding = Coding::kRate;
  int max_timesteps = 1;
  std::map<std::string, NeuronModelSpec> neuron_models;
  std::vector<LayerSpec> layers;
  WeightStore weights;

  // Neuron model of layer `index`; nullptr for MaxPool2D/Flatten.
  const NeuronModelSpec* model_of(std::size_t index) const;
  std::span<const float> weights_of(std::size_t index) const;
  std::span<const float> recurrent_weights_of(std::size_t index) const;

  const Shape& input_shape() const { return layers.front().input_shape; }
  const Shape& output_shape() const { return layers.back().output_shape; }

  friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;
};

struct LayerCounts {
  std::int64_t n_n = 0;   // neurons (output elements)
  std::int64_t n_s = 0;   // presynaptic connections per neuron
  std::int64_t n_sr = 0;  // recurrent connections per neuron
};

// Per-layer structural counts. Requires a validated network.
std::vector<LayerCounts> structural_counts(const NetworkSpec& net);
LayerCounts layer_counts(const LayerSpec& layer);

// Output extent of a strided window along one axis:
// floor((in + 2p - k) / s) + 1, or 0 when the window never fits.
std::int64_t window_output_extent(std::int64_t in, int kernel, int stride,
                                  int pad);

// How a layer is driven during inference.
//   kStatic     - analog prefix computed once (ANN layers, pooling or
//                 flattening of analog data)
//   kAnalogFed  - first spiking layer; its weighted sums come from analog
//                 data and are computed once
//   kSpiking    - driven by spikes every timestep
enum class LayerRole { kStatic, kAnalogFed, kSpiking };

// Index of the first layer with a spiking neuron model, or layers.size().
std::size_t first_spiking_layer(const NetworkSpec& net);

// Throws Error(kSchemaError) when an ANN layer would receive spikes.
std::vector<LayerRole> layer_roles(const NetworkSpec& net, bool analog_input);

// Full structural validation; throws Error on the first violation.
void validate(const NetworkSpec& net);

// Manifest (JSON) + weights container (EMWT binary) -> validated network.
NetworkSpec parse_network(std::string_view manifest_bytes,
                          std::span<const std::byte> weights_bytes);

std::string serialize_manifest(const NetworkSpec& net);

// Reads `manifest_path` and `weights_path` from disk and parses them.
NetworkSpec load_network(const std::string& manifest_path,
                         const std::string& weights_path);
void save_network(const NetworkSpec& net, const std::string& manifest_path,
                  const std::string& weights_path);

}  // namespace emacprof

#endif  // EMACPROF_NETSPEC_HPP_
