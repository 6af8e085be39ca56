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

#ifndef EMACPROF_ARCHITECTURES_HPP_
#define EMACPROF_ARCHITECTURES_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "emacprof/netspec.hpp"

namespace emacprof {

// Random weight initialization. Each weight is drawn uniformly with mean
// `mean_gain / n_s` and half-width `spread_gain * sqrt(3 / n_s)`.
struct WeightInit {
  std::uint64_t seed = 0;
  double mean_gain = 0.0;
  double spread_gain = 1.0;
};

// Appends layers front to back, inferring shapes. Weights are filled in by
// build(); layer names default to layer<i>.
class NetworkBuilder {
 public:
  NetworkBuilder(Shape input_shape, Coding coding, int max_timesteps);

  NetworkBuilder& model(const std::string& name, const NeuronModelSpec& spec);

  NetworkBuilder& dense(std::int64_t units, const std::string& model);
  NetworkBuilder& recurrent_dense(std::int64_t units, const std::string& model);
  NetworkBuilder& conv2d(std::int64_t filters, int kernel, int stride,
                         Padding padding, const std::string& model);
  NetworkBuilder& locally_connected(std::int64_t filters, int kernel, int stride,
                                    const std::string& model);
  NetworkBuilder& max_pool(int kernel, int stride = 0);
  NetworkBuilder& flatten();

  // Renames the most recently added layer.
  NetworkBuilder& named(const std::string& name);

  const Shape& current_shape() const { return shape_; }

  // Draws weights and validates the result.
  NetworkSpec build(const WeightInit& init = {}) const;

 private:
  LayerSpec& push(LayerKind kind, Shape out);

  Shape shape_;
  NetworkSpec net_;
};

// Spiking-once IFL model used by the reference CNNs.
NeuronModelSpec ifl_spike_once();

// Conv2D(3x3, valid) -> MaxPool(2x2) blocks, the last without pooling, then
// Flatten and Dense(10). `filters` lists the per-block channel counts.
// Input is (3, side, side), ROC coding with 64 timesteps.
NetworkSpec akida_cnn(const std::vector<std::int64_t>& filters,
                      const WeightInit& init, std::int64_t side = 32);

// The three reference CNNs by name: "cnn-16-16", "cnn-16-32",
// "cnn-32-32-64".
std::optional<NetworkSpec> reference_cnn(const std::string& name,
                                         const WeightInit& init,
                                         std::int64_t side = 32);

// Spiking VGG-style baseline on (3,64,64): a 3x3 convolutional encoder with
// 16 channels, two stride-2 5x5 convolutions (32, 64 channels), then dense
// 100 and dense 10.
NetworkSpec vgg_baseline(const NeuronModelSpec& model, Coding coding,
                         int max_timesteps, const WeightInit& init);

// Fully connected chain on a flat input.
NetworkSpec dense_mlp(std::int64_t inputs, const std::vector<std::int64_t>& units,
                      const NeuronModelSpec& model, Coding coding,
                      int max_timesteps, const WeightInit& init);

// Locally connected first layer on (C,H,W) input, then a dense chain.
NetworkSpec lcl_mlp(const Shape& input, std::int64_t filters, int kernel,
                    int stride, const std::vector<std::int64_t>& units,
                    const NeuronModelSpec& model, Coding coding,
                    int max_timesteps, const WeightInit& init);

}  // namespace emacprof

#endif  // EMACPROF_ARCHITECTURES_HPP_
