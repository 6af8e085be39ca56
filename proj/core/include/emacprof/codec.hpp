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

#ifndef EMACPROF_CODEC_HPP_
#define EMACPROF_CODEC_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "emacprof/netspec.hpp"

namespace emacprof {

enum class EncodingMode { kAnalogCurrent, kPoissonSpikes };

struct Tensor {
  Shape shape;
  std::vector<float> values;
};

struct EncodedInput {
  EncodingMode mode = EncodingMode::kAnalogCurrent;
  Shape shape;
  std::vector<float> values;
  std::uint64_t seed = 0;

  bool is_analog() const { return mode == EncodingMode::kAnalogCurrent; }
  std::size_t size() const { return values.size(); }

  // Poisson only: whether `pixel` spikes at timestep `t` (1-based).
  bool spikes(std::size_t pixel, std::int64_t t) const;
};

// Deterministic uniform in [0,1) keyed by (seed, pixel, t).
double counter_uniform(std::uint64_t seed, std::uint64_t pixel,
                       std::uint64_t t);

EncodedInput encode(const Tensor& input, const Shape& expected_shape,
                    EncodingMode mode, std::uint64_t seed = 0);

// Per-timestep boolean activity of a group of neurons, time-major.
class Raster {
 public:
  Raster() = default;
  explicit Raster(std::size_t neurons) : neurons_(neurons) {}

  void push_step(std::span<const std::uint8_t> spikes);
  bool at(std::size_t neuron, std::size_t step) const {
    return data_[step * neurons_ + neuron] != 0;
  }
  void set(std::size_t neuron, std::size_t step, bool value) {
    data_[step * neurons_ + neuron] = value ? 1 : 0;
  }
  std::size_t neurons() const { return neurons_; }
  std::size_t steps() const { return neurons_ ? data_.size() / neurons_ : 0; }

 private:
  std::size_t neurons_ = 0;
  std::vector<std::uint8_t> data_;
};

class VoltageHistory {
 public:
  VoltageHistory() = default;
  explicit VoltageHistory(std::size_t neurons) : neurons_(neurons) {}

  void push_step(std::span<const double> voltages);
  double at(std::size_t neuron, std::size_t step) const {
    return data_[step * neurons_ + neuron];
  }
  std::size_t neurons() const { return neurons_; }
  std::size_t steps() const { return neurons_ ? data_.size() / neurons_ : 0; }
  void scale(double factor) {
    for (auto& v : data_) v *= factor;
  }

 private:
  std::size_t neurons_ = 0;
  std::vector<double> data_;
};

struct Decision {
  std::int64_t class_index = 0;
  std::int64_t latency_t = 0;  // timesteps
  bool fallback_used = false;

  friend bool operator==(const Decision&, const Decision&) = default;
};

// Argmax over neurons of the max-over-time voltage; ties go to the lowest
// index. latency_t is the history length.
Decision decode_max_membrane(const VoltageHistory& history);

// Earliest output spike wins; ties go to the lowest index. With no spike at
// all, falls back to decode_max_membrane(history) and flags it.
Decision decode_roc(const Raster& raster, const VoltageHistory& history);

// Reads a tensor from `.bin` (header line `shape=C,H,W` then little-endian
// binary32) or `.csv` (flattened values, shape (N,)).
Tensor read_tensor_file(const std::string& path);
void write_tensor_bin(const Tensor& tensor, const std::string& path);

// Lists input files: a single file, or every .bin/.csv in a directory in
// lexicographic order.
std::vector<std::string> list_input_files(const std::string& path);

}  // namespace emacprof

#endif  // EMACPROF_CODEC_HPP_
