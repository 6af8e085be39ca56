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

#include "emacprof/architectures.hpp"

#include <cmath>
#include <random>
#include <utility>

#include "emacprof/errors.hpp"

namespace emacprof {

NetworkBuilder::NetworkBuilder(Shape input_shape, Coding coding, int max_timesteps)
    : shape_(std::move(input_shape)) {
  net_.coding = coding;
  net_.max_timesteps = max_timesteps;
}

NetworkBuilder& NetworkBuilder::model(const std::string& name,
                                      const NeuronModelSpec& spec) {
  net_.neuron_models[name] = spec;
  return *this;
}

LayerSpec& NetworkBuilder::push(LayerKind kind, Shape out) {
  LayerSpec layer;
  layer.name = "layer" + std::to_string(net_.layers.size());
  layer.kind = kind;
  layer.input_shape = shape_;
  layer.output_shape = out;
  shape_ = std::move(out);
  net_.layers.push_back(std::move(layer));
  return net_.layers.back();
}

NetworkBuilder& NetworkBuilder::dense(std::int64_t units, const std::string& model) {
  push(LayerKind::kDense, {units}).neuron_model = model;
  return *this;
}

NetworkBuilder& NetworkBuilder::recurrent_dense(std::int64_t units,
                                                const std::string& model) {
  push(LayerKind::kRecurrentDense, {units}).neuron_model = model;
  return *this;
}

NetworkBuilder& NetworkBuilder::conv2d(std::int64_t filters, int kernel, int stride,
                                       Padding padding, const std::string& model) {
  if (shape_.size() != 3) throw Error(Errc::kShapeMismatch, "conv2d needs (C,H,W) input");
  const int p = padding.amount();
  Shape out{filters, window_output_extent(shape_[1], kernel, stride, p),
            window_output_extent(shape_[2], kernel, stride, p)};
  auto& layer = push(LayerKind::kConv2D, std::move(out));
  layer.kernel = {kernel, kernel};
  layer.stride = {stride, stride};
  layer.padding = padding;
  layer.neuron_model = model;
  return *this;
}

NetworkBuilder& NetworkBuilder::locally_connected(std::int64_t filters, int kernel,
                                                  int stride,
                                                  const std::string& model) {
  if (shape_.size() != 3) {
    throw Error(Errc::kShapeMismatch, "locally_connected needs (C,H,W) input");
  }
  Shape out{filters, window_output_extent(shape_[1], kernel, stride, 0),
            window_output_extent(shape_[2], kernel, stride, 0)};
  auto& layer = push(LayerKind::kLocallyConnected, std::move(out));
  layer.kernel = {kernel, kernel};
  layer.stride = {stride, stride};
  layer.neuron_model = model;
  return *this;
}

NetworkBuilder& NetworkBuilder::max_pool(int kernel, int stride) {
  if (shape_.size() != 3) throw Error(Errc::kShapeMismatch, "max_pool needs (C,H,W) input");
  if (stride == 0) stride = kernel;
  Shape out{shape_[0], window_output_extent(shape_[1], kernel, stride, 0),
            window_output_extent(shape_[2], kernel, stride, 0)};
  auto& layer = push(LayerKind::kMaxPool2D, std::move(out));
  layer.kernel = {kernel, kernel};
  layer.stride = {stride, stride};
  return *this;
}

NetworkBuilder& NetworkBuilder::flatten() {
  push(LayerKind::kFlatten, {num_elements(shape_)});
  return *this;
}

NetworkBuilder& NetworkBuilder::named(const std::string& name) {
  if (!net_.layers.empty()) net_.layers.back().name = name;
  return *this;
}

namespace {

class Sampler {
 public:
  Sampler(const WeightInit& init) : init_(init), gen_(init.seed) {}

  // Uniform draw for a neuron with `fanin` connections.
  float draw(std::int64_t fanin) {
    const double n = static_cast<double>(std::max<std::int64_t>(fanin, 1));
    const double u = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    const double half = init_.spread_gain * std::sqrt(3.0 / n);
    return static_cast<float>(init_.mean_gain / n + (2.0 * u - 1.0) * half);
  }

 private:
  WeightInit init_;
  std::mt19937_64 gen_;
};

std::vector<float> lcl_weights(const LayerSpec& layer, Sampler& sampler) {
  const auto& in = layer.input_shape;
  const auto& out = layer.output_shape;
  const std::int64_t n_in = num_elements(in);
  const std::int64_t fanin = layer_counts(layer).n_s;
  std::vector<float> w(static_cast<std::size_t>(num_elements(out) * n_in), 0.0f);
  for (std::int64_t f = 0; f < out[0]; ++f) {
    for (std::int64_t oy = 0; oy < out[1]; ++oy) {
      for (std::int64_t ox = 0; ox < out[2]; ++ox) {
        const std::int64_t j = (f * out[1] + oy) * out[2] + ox;
        for (std::int64_t c = 0; c < in[0]; ++c) {
          for (int ky = 0; ky < layer.kernel[0]; ++ky) {
            for (int kx = 0; kx < layer.kernel[1]; ++kx) {
              const std::int64_t y = oy * layer.stride[0] + ky;
              const std::int64_t x = ox * layer.stride[1] + kx;
              w[j * n_in + (c * in[1] + y) * in[2] + x] = sampler.draw(fanin);
            }
          }
        }
      }
    }
  }
  return w;
}

}  // namespace

NetworkSpec NetworkBuilder::build(const WeightInit& init) const {
  NetworkSpec net = net_;
  Sampler sampler(init);
  for (auto& layer : net.layers) {
    if (!layer.has_neurons()) continue;
    const auto c = layer_counts(layer);
    layer.weights_ref = layer.name + ".w";
    std::vector<float> w;
    if (layer.kind == LayerKind::kLocallyConnected) {
      w = lcl_weights(layer, sampler);
    } else {
      const std::int64_t size = layer.kind == LayerKind::kConv2D
                                    ? layer.output_shape[0] * c.n_s
                                    : c.n_n * c.n_s;
      w.resize(static_cast<std::size_t>(size));
      for (auto& v : w) v = sampler.draw(c.n_s);
    }
    net.weights.set(layer.weights_ref, std::move(w));
    if (layer.kind == LayerKind::kRecurrentDense) {
      layer.recurrent_weights_ref = layer.name + ".rw";
      std::vector<float> rw(static_cast<std::size_t>(c.n_n * c.n_n));
      for (auto& v : rw) v = sampler.draw(c.n_n);
      net.weights.set(*layer.recurrent_weights_ref, std::move(rw));
    }
  }
  validate(net);
  return net;
}

NeuronModelSpec ifl_spike_once() {
  NeuronModelSpec m;
  m.kind = NeuronKind::kIfl;
  m.spike_once = true;
  return m;
}

NetworkSpec akida_cnn(const std::vector<std::int64_t>& filters,
                      const WeightInit& init, std::int64_t side) {
  if (filters.empty()) throw Error(Errc::kSchemaError, "akida_cnn needs at least one block");
  NetworkBuilder b({3, side, side}, Coding::kRoc, 64);
  b.model("ifl", ifl_spike_once());
  for (std::size_t i = 0; i < filters.size(); ++i) {
    b.conv2d(filters[i], 3, 1, {}, "ifl").named("conv" + std::to_string(i));
    if (i + 1 < filters.size()) b.max_pool(2).named("pool" + std::to_string(i));
  }
  b.flatten().named("flatten").dense(10, "ifl").named("dense");
  return b.build(init);
}

std::optional<NetworkSpec> reference_cnn(const std::string& name,
                                         const WeightInit& init,
                                         std::int64_t side) {
  if (name == "cnn-16-16") return akida_cnn({16, 16}, init, side);
  if (name == "cnn-16-32") return akida_cnn({16, 32}, init, side);
  if (name == "cnn-32-32-64") return akida_cnn({32, 32, 64}, init, side);
  return std::nullopt;
}

NetworkSpec vgg_baseline(const NeuronModelSpec& model, Coding coding,
                         int max_timesteps, const WeightInit& init) {
  const Padding same1{Padding::Mode::kZero, 1};
  const Padding same2{Padding::Mode::kZero, 2};
  NetworkBuilder b({3, 64, 64}, coding, max_timesteps);
  b.model("snn", model)
      .conv2d(16, 3, 1, same1, "snn").named("encoder")
      .conv2d(32, 5, 2, same2, "snn").named("conv1")
      .conv2d(64, 5, 2, same2, "snn").named("conv2")
      .flatten().named("flatten")
      .dense(100, "snn").named("fc1")
      .dense(10, "snn").named("fc2");
  return b.build(init);
}

NetworkSpec dense_mlp(std::int64_t inputs, const std::vector<std::int64_t>& units,
                      const NeuronModelSpec& model, Coding coding,
                      int max_timesteps, const WeightInit& init) {
  NetworkBuilder b({inputs}, coding, max_timesteps);
  b.model("m", model);
  for (auto n : units) b.dense(n, "m");
  return b.build(init);
}

NetworkSpec lcl_mlp(const Shape& input, std::int64_t filters, int kernel,
                    int stride, const std::vector<std::int64_t>& units,
                    const NeuronModelSpec& model, Coding coding,
                    int max_timesteps, const WeightInit& init) {
  NetworkBuilder b(input, coding, max_timesteps);
  b.model("m", model).locally_connected(filters, kernel, stride, "m").flatten();
  for (auto n : units) b.dense(n, "m");
  return b.build(init);
}

}  // namespace emacprof
