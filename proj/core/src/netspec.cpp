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

#include "emacprof/netspec.hpp"

#include <fstream>
#include <iterator>
#include <sstream>

#include <nlohmann/json.hpp>

#include "emacprof/errors.hpp"

namespace emacprof {

using nlohmann::json;

std::int64_t num_elements(const Shape& shape) {
  std::int64_t n = 1;
  for (auto d : shape) n *= d;
  return shape.empty() ? 0 : n;
}

std::string to_string(const Shape& shape) {
  std::string s = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + ")";
}

std::string_view to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::kDense: return "dense";
    case LayerKind::kConv2D: return "conv2d";
    case LayerKind::kLocallyConnected: return "locally_connected";
    case LayerKind::kRecurrentDense: return "recurrent_dense";
    case LayerKind::kMaxPool2D: return "max_pool2d";
    case LayerKind::kFlatten: return "flatten";
  }
  return "?";
}

std::optional<LayerKind> layer_kind_from_string(std::string_view name) {
  for (auto k : {LayerKind::kDense, LayerKind::kConv2D,
                 LayerKind::kLocallyConnected, LayerKind::kRecurrentDense,
                 LayerKind::kMaxPool2D, LayerKind::kFlatten}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

std::string_view to_string(Coding coding) {
  return coding == Coding::kRate ? "rate" : "roc";
}

std::optional<Coding> coding_from_string(std::string_view name) {
  if (name == "rate") return Coding::kRate;
  if (name == "roc") return Coding::kRoc;
  return std::nullopt;
}

std::string_view to_string(NeuronKind kind) {
  switch (kind) {
    case NeuronKind::kLif: return "lif";
    case NeuronKind::kIfl: return "ifl";
    case NeuronKind::kAnnRelu: return "ann_relu";
  }
  return "?";
}

std::optional<NeuronKind> neuron_kind_from_string(std::string_view name) {
  if (name == "lif") return NeuronKind::kLif;
  if (name == "ifl") return NeuronKind::kIfl;
  if (name == "ann_relu") return NeuronKind::kAnnRelu;
  return std::nullopt;
}

std::string validate(const NeuronModelSpec& m) {
  if (!(m.dt > 0)) return "dt must be > 0";
  if (!m.is_spiking()) {
    if (m.spike_once) return "spike_once requires a spiking neuron kind";
    return {};
  }
  if (!(m.v_th > 0)) return "v_th must be > 0 for spiking neurons";
  if (m.kind == NeuronKind::kLif) {
    if (!(m.tau_syn > 0) || !(m.tau_mem > 0)) {
      return "LIF time constants must be > 0";
    }
    if (!(m.dt < m.tau_syn) || !(m.dt < m.tau_mem)) {
      return "LIF requires dt < tau_syn and dt < tau_mem";
    }
  }
  return {};
}

const NeuronModelSpec* NetworkSpec::model_of(std::size_t index) const {
  const auto& layer = layers.at(index);
  if (!layer.has_neurons()) return nullptr;
  auto it = neuron_models.find(layer.neuron_model);
  return it == neuron_models.end() ? nullptr : &it->second;
}

std::span<const float> NetworkSpec::weights_of(std::size_t index) const {
  return weights.get(layers.at(index).weights_ref);
}

std::span<const float> NetworkSpec::recurrent_weights_of(
    std::size_t index) const {
  const auto& ref = layers.at(index).recurrent_weights_ref;
  if (!ref) return {};
  return weights.get(*ref);
}

std::int64_t window_output_extent(std::int64_t in, int kernel, int stride,
                                  int pad) {
  const std::int64_t span = in + 2 * static_cast<std::int64_t>(pad) - kernel;
  if (span < 0 || stride <= 0) return 0;
  return span / stride + 1;
}

LayerCounts layer_counts(const LayerSpec& layer) {
  LayerCounts c;
  c.n_n = num_elements(layer.output_shape);
  switch (layer.kind) {
    case LayerKind::kDense:
      c.n_s = num_elements(layer.input_shape);
      break;
    case LayerKind::kRecurrentDense:
      c.n_s = num_elements(layer.input_shape);
      c.n_sr = c.n_n;
      break;
    case LayerKind::kConv2D:
    case LayerKind::kLocallyConnected:
      c.n_s = layer.input_shape.at(0) * layer.kernel[0] * layer.kernel[1];
      break;
    case LayerKind::kMaxPool2D:
      c.n_s = static_cast<std::int64_t>(layer.kernel[0]) * layer.kernel[1];
      break;
    case LayerKind::kFlatten:
      c.n_s = 0;
      break;
  }
  return c;
}

std::vector<LayerCounts> structural_counts(const NetworkSpec& net) {
  std::vector<LayerCounts> out;
  out.reserve(net.layers.size());
  for (const auto& layer : net.layers) out.push_back(layer_counts(layer));
  return out;
}

std::size_t first_spiking_layer(const NetworkSpec& net) {
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const auto* m = net.model_of(l);
    if (m && m->is_spiking()) return l;
  }
  return net.layers.size();
}

std::vector<LayerRole> layer_roles(const NetworkSpec& net, bool analog_input) {
  const std::size_t first = first_spiking_layer(net);
  std::vector<LayerRole> roles(net.layers.size(), LayerRole::kSpiking);
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const auto* m = net.model_of(l);
    const bool ann = m && !m->is_spiking();
    if (analog_input && l < first) {
      roles[l] = LayerRole::kStatic;
    } else if (analog_input && l == first) {
      roles[l] = LayerRole::kAnalogFed;
    } else if (ann) {
      throw Error(Errc::kSchemaError,
                  "layer " + std::to_string(l) + " '" + net.layers[l].name +
                      "': ANN layer cannot consume spike input");
    }
  }
  return roles;
}

namespace {

std::string where(std::size_t index, const LayerSpec& layer) {
  return "layer " + std::to_string(index) + " '" + layer.name + "'";
}

[[noreturn]] void fail(Errc code, std::size_t index, const LayerSpec& layer,
                       const std::string& what) {
  throw Error(code, where(index, layer) + ": " + what);
}

void expect_shape(std::size_t index, const LayerSpec& layer,
                  const Shape& expected) {
  if (layer.output_shape != expected) {
    fail(Errc::kShapeMismatch, index, layer,
         "output_shape " + to_string(layer.output_shape) + " but expected " +
             to_string(expected));
  }
}

void expect_weights(const NetworkSpec& net, std::size_t index,
                    const std::string& ref, std::int64_t expected) {
  const auto& layer = net.layers[index];
  if (ref.empty()) fail(Errc::kSchemaError, index, layer, "missing weights_ref");
  if (!net.weights.contains(ref)) {
    fail(Errc::kUnknownRef, index, layer, "weights_ref '" + ref + "' not found");
  }
  const auto got = static_cast<std::int64_t>(net.weights.get(ref).size());
  if (got != expected) {
    fail(Errc::kShapeMismatch, index, layer,
         "weights '" + ref + "' has " + std::to_string(got) +
             " elements, expected " + std::to_string(expected));
  }
}

void check_window_params(std::size_t index, const LayerSpec& layer) {
  if (layer.input_shape.size() != 3) {
    fail(Errc::kShapeMismatch, index, layer,
         "input_shape must be (C,H,W), got " + to_string(layer.input_shape));
  }
  if (layer.kernel[0] < 1 || layer.kernel[1] < 1 || layer.stride[0] < 1 ||
      layer.stride[1] < 1 || layer.padding.pad < 0) {
    fail(Errc::kSchemaError, index, layer,
         "kernel and stride must be >= 1, pad >= 0");
  }
}

Shape spatial_output(const LayerSpec& layer, std::int64_t channels) {
  const int p = layer.padding.amount();
  return {channels,
          window_output_extent(layer.input_shape[1], layer.kernel[0],
                               layer.stride[0], p),
          window_output_extent(layer.input_shape[2], layer.kernel[1],
                               layer.stride[1], p)};
}

void check_lcl_mask(const NetworkSpec& net, std::size_t index) {
  const auto& layer = net.layers[index];
  const auto w = net.weights_of(index);
  const auto& in = layer.input_shape;
  const auto& out = layer.output_shape;
  const std::int64_t n_in = num_elements(in);
  for (std::int64_t f = 0; f < out[0]; ++f) {
    for (std::int64_t oy = 0; oy < out[1]; ++oy) {
      for (std::int64_t ox = 0; ox < out[2]; ++ox) {
        const std::int64_t j = (f * out[1] + oy) * out[2] + ox;
        const std::int64_t y0 = oy * layer.stride[0];
        const std::int64_t x0 = ox * layer.stride[1];
        for (std::int64_t c = 0; c < in[0]; ++c) {
          for (std::int64_t y = 0; y < in[1]; ++y) {
            const bool row_in = y >= y0 && y < y0 + layer.kernel[0];
            for (std::int64_t x = 0; x < in[2]; ++x) {
              const bool inside =
                  row_in && x >= x0 && x < x0 + layer.kernel[1];
              const float v = w[j * n_in + (c * in[1] + y) * in[2] + x];
              if (!inside && v != 0.0f) {
                fail(Errc::kMaskViolation, index, layer,
                     "nonzero weight outside receptive field of neuron " +
                         std::to_string(j));
              }
            }
          }
        }
      }
    }
  }
}

void validate_layer(const NetworkSpec& net, std::size_t index) {
  const auto& layer = net.layers[index];
  if (layer.input_shape.empty() || layer.output_shape.empty()) {
    fail(Errc::kSchemaError, index, layer, "input_shape/output_shape required");
  }
  for (auto d : layer.input_shape) {
    if (d <= 0) fail(Errc::kShapeMismatch, index, layer, "non-positive input dim");
  }
  for (auto d : layer.output_shape) {
    if (d <= 0) fail(Errc::kShapeMismatch, index, layer, "non-positive output dim");
  }

  if (layer.has_neurons()) {
    if (layer.neuron_model.empty()) {
      fail(Errc::kSchemaError, index, layer, "missing neuron_model");
    }
    if (!net.neuron_models.contains(layer.neuron_model)) {
      fail(Errc::kUnknownRef, index, layer,
           "neuron_model '" + layer.neuron_model + "' not defined");
    }
  } else if (!layer.neuron_model.empty() || !layer.weights_ref.empty() ||
             layer.recurrent_weights_ref) {
    fail(Errc::kSchemaError, index, layer,
         "pooling/flatten layers take no neuron model or weights");
  }
  if (layer.recurrent_weights_ref && layer.kind != LayerKind::kRecurrentDense) {
    fail(Errc::kSchemaError, index, layer,
         "recurrent_weights_ref only valid on recurrent_dense");
  }

  const std::int64_t n_in = num_elements(layer.input_shape);
  const std::int64_t n_out = num_elements(layer.output_shape);
  switch (layer.kind) {
    case LayerKind::kDense:
      if (layer.output_shape.size() != 1) {
        fail(Errc::kShapeMismatch, index, layer, "dense output must be (N,)");
      }
      expect_weights(net, index, layer.weights_ref, n_out * n_in);
      break;
    case LayerKind::kRecurrentDense:
      if (layer.output_shape.size() != 1) {
        fail(Errc::kShapeMismatch, index, layer,
             "recurrent_dense output must be (N,)");
      }
      expect_weights(net, index, layer.weights_ref, n_out * n_in);
      if (const auto* m = net.model_of(index); m && !m->is_spiking()) {
        fail(Errc::kSchemaError, index, layer,
             "recurrent_dense needs a spiking neuron model");
      }
      if (!layer.recurrent_weights_ref) {
        fail(Errc::kSchemaError, index, layer, "missing recurrent_weights_ref");
      }
      expect_weights(net, index, *layer.recurrent_weights_ref, n_out * n_out);
      break;
    case LayerKind::kConv2D: {
      check_window_params(index, layer);
      if (layer.output_shape.size() != 3) {
        fail(Errc::kShapeMismatch, index, layer, "conv2d output must be (C,H,W)");
      }
      const Shape expected = spatial_output(layer, layer.output_shape[0]);
      if (expected[1] < 1 || expected[2] < 1) {
        fail(Errc::kShapeMismatch, index, layer, "kernel larger than input");
      }
      expect_shape(index, layer, expected);
      expect_weights(net, index, layer.weights_ref,
                     layer.output_shape[0] * layer.input_shape[0] *
                         layer.kernel[0] * layer.kernel[1]);
      break;
    }
    case LayerKind::kLocallyConnected: {
      check_window_params(index, layer);
      if (layer.padding.mode != Padding::Mode::kValid) {
        fail(Errc::kSchemaError, index, layer,
             "locally_connected supports valid padding only");
      }
      if (layer.output_shape.size() != 3) {
        fail(Errc::kShapeMismatch, index, layer,
             "locally_connected output must be (F,H,W)");
      }
      const Shape expected = spatial_output(layer, layer.output_shape[0]);
      if (expected[1] < 1 || expected[2] < 1) {
        fail(Errc::kShapeMismatch, index, layer, "kernel larger than input");
      }
      expect_shape(index, layer, expected);
      expect_weights(net, index, layer.weights_ref, n_out * n_in);
      check_lcl_mask(net, index);
      break;
    }
    case LayerKind::kMaxPool2D: {
      check_window_params(index, layer);
      if (layer.padding.mode != Padding::Mode::kValid) {
        fail(Errc::kSchemaError, index, layer, "max_pool2d supports valid padding only");
      }
      const Shape expected = spatial_output(layer, layer.input_shape[0]);
      if (expected[1] < 1 || expected[2] < 1) {
        fail(Errc::kShapeMismatch, index, layer, "pool window larger than input");
      }
      expect_shape(index, layer, expected);
      break;
    }
    case LayerKind::kFlatten:
      expect_shape(index, layer, Shape{n_in});
      break;
  }
}

}  // namespace

void validate(const NetworkSpec& net) {
  if (net.version != 1) {
    throw Error(Errc::kSchemaError,
                "unsupported manifest version " + std::to_string(net.version));
  }
  if (net.max_timesteps < 1) {
    throw Error(Errc::kSchemaError, "max_timesteps must be >= 1");
  }
  if (net.layers.empty()) {
    throw Error(Errc::kSchemaError, "network has no layers");
  }
  for (const auto& [name, model] : net.neuron_models) {
    if (auto why = validate(model); !why.empty()) {
      throw Error(Errc::kSchemaError, "neuron model '" + name + "': " + why);
    }
  }
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    validate_layer(net, l);
    if (l > 0 && net.layers[l].input_shape != net.layers[l - 1].output_shape) {
      fail(Errc::kShapeMismatch, l, net.layers[l],
           "input_shape " + to_string(net.layers[l].input_shape) +
               " does not match previous output " +
               to_string(net.layers[l - 1].output_shape));
    }
  }
  bool seen_spiking = false;
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const auto* m = net.model_of(l);
    if (!m) continue;
    if (m->is_spiking()) {
      seen_spiking = true;
    } else if (seen_spiking) {
      fail(Errc::kSchemaError, l, net.layers[l],
           "ANN layers must precede all spiking layers");
    }
  }
  if (!net.layers.back().has_neurons()) {
    fail(Errc::kSchemaError, net.layers.size() - 1, net.layers.back(),
         "last layer must carry neurons to be decoded");
  }
}

namespace {

Shape shape_from_json(const json& j, const char* field) {
  if (!j.is_array()) {
    throw Error(Errc::kSchemaError, std::string(field) + " must be an array");
  }
  Shape s;
  for (const auto& d : j) s.push_back(d.get<std::int64_t>());
  if (s.size() != 1 && s.size() != 3) {
    throw Error(Errc::kSchemaError,
                std::string(field) + " must have 1 or 3 dimensions");
  }
  return s;
}

std::array<int, 2> pair_from_json(const json& j) {
  if (j.is_number_integer()) return {j.get<int>(), j.get<int>()};
  if (!j.is_array() || j.size() != 2) {
    throw Error(Errc::kSchemaError, "kernel/stride must be an int or [h,w]");
  }
  return {j[0].get<int>(), j[1].get<int>()};
}

NeuronModelSpec model_from_json(const std::string& name, const json& j) {
  if (!j.is_object()) {
    throw Error(Errc::kSchemaError, "neuron model '" + name + "' must be an object");
  }
  NeuronModelSpec m;
  const auto kind = neuron_kind_from_string(j.at("kind").get<std::string>());
  if (!kind) {
    throw Error(Errc::kSchemaError, "neuron model '" + name + "': unknown kind");
  }
  m.kind = *kind;
  m.tau_syn = j.value("tau_syn", m.tau_syn);
  m.tau_mem = j.value("tau_mem", m.tau_mem);
  m.dt = j.value("dt", m.dt);
  m.v_th = j.value("v_th", m.v_th);
  m.bias = j.value("bias", m.bias);
  m.spike_once = j.value("spike_once", m.spike_once);
  return m;
}

LayerSpec layer_from_json(std::size_t index, const json& j) {
  if (!j.is_object()) {
    throw Error(Errc::kSchemaError,
                "layer " + std::to_string(index) + " must be an object");
  }
  LayerSpec layer;
  layer.name = j.value("name", "layer" + std::to_string(index));
  const auto kind = layer_kind_from_string(j.at("kind").get<std::string>());
  if (!kind) {
    throw Error(Errc::kSchemaError,
                where(index, layer) + ": unknown kind '" +
                    j.at("kind").get<std::string>() + "'");
  }
  layer.kind = *kind;
  layer.input_shape = shape_from_json(j.at("input_shape"), "input_shape");
  layer.output_shape = shape_from_json(j.at("output_shape"), "output_shape");
  if (j.contains("kernel")) layer.kernel = pair_from_json(j["kernel"]);
  if (j.contains("stride")) {
    layer.stride = pair_from_json(j["stride"]);
  } else if (layer.kind == LayerKind::kMaxPool2D) {
    layer.stride = layer.kernel;
  }
  const std::string padding = j.value("padding", "valid");
  if (padding == "valid") {
    layer.padding = {Padding::Mode::kValid, 0};
  } else if (padding == "zero") {
    layer.padding = {Padding::Mode::kZero, j.value("pad", 0)};
  } else {
    throw Error(Errc::kSchemaError,
                where(index, layer) + ": unknown padding '" + padding + "'");
  }
  layer.neuron_model = j.value("neuron_model", "");
  layer.weights_ref = j.value("weights_ref", "");
  if (j.contains("recurrent_weights_ref") &&
      !j["recurrent_weights_ref"].is_null()) {
    layer.recurrent_weights_ref = j["recurrent_weights_ref"].get<std::string>();
  }
  return layer;
}

}  // namespace

NetworkSpec parse_network(std::string_view manifest_bytes,
                          std::span<const std::byte> weights_bytes) {
  NetworkSpec net;
  try {
    const json doc = json::parse(manifest_bytes);
    if (!doc.is_object()) throw Error(Errc::kSchemaError, "manifest must be an object");
    net.version = doc.at("version").get<int>();
    const auto coding = coding_from_string(doc.at("coding").get<std::string>());
    if (!coding) throw Error(Errc::kSchemaError, "coding must be 'rate' or 'roc'");
    net.coding = *coding;
    net.max_timesteps = doc.at("max_timesteps").get<int>();
    if (doc.contains("neuron_models")) {
      for (const auto& [name, m] : doc["neuron_models"].items()) {
        net.neuron_models[name] = model_from_json(name, m);
      }
    }
    const auto& layers = doc.at("layers");
    if (!layers.is_array()) throw Error(Errc::kSchemaError, "layers must be an array");
    for (std::size_t i = 0; i < layers.size(); ++i) {
      net.layers.push_back(layer_from_json(i, layers[i]));
    }
  } catch (const json::exception& e) {
    throw Error(Errc::kSchemaError, std::string("manifest: ") + e.what());
  }
  net.weights = WeightStore::parse(weights_bytes);
  validate(net);
  return net;
}

std::string serialize_manifest(const NetworkSpec& net) {
  json doc;
  doc["version"] = net.version;
  doc["coding"] = std::string(to_string(net.coding));
  doc["max_timesteps"] = net.max_timesteps;
  json models = json::object();
  for (const auto& [name, m] : net.neuron_models) {
    models[name] = {{"kind", std::string(to_string(m.kind))},
                    {"tau_syn", m.tau_syn},
                    {"tau_mem", m.tau_mem},
                    {"dt", m.dt},
                    {"v_th", m.v_th},
                    {"bias", m.bias},
                    {"spike_once", m.spike_once}};
  }
  doc["neuron_models"] = models;
  json layers = json::array();
  for (const auto& layer : net.layers) {
    json j;
    j["name"] = layer.name;
    j["kind"] = std::string(to_string(layer.kind));
    j["input_shape"] = layer.input_shape;
    j["output_shape"] = layer.output_shape;
    j["kernel"] = layer.kernel;
    j["stride"] = layer.stride;
    j["padding"] = layer.padding.mode == Padding::Mode::kValid ? "valid" : "zero";
    j["pad"] = layer.padding.pad;
    if (!layer.neuron_model.empty()) j["neuron_model"] = layer.neuron_model;
    if (!layer.weights_ref.empty()) j["weights_ref"] = layer.weights_ref;
    if (layer.recurrent_weights_ref) {
      j["recurrent_weights_ref"] = *layer.recurrent_weights_ref;
    }
    layers.push_back(std::move(j));
  }
  doc["layers"] = layers;
  return doc.dump(2) + "\n";
}

namespace {

std::vector<std::byte> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kIoError, "cannot open '" + path + "'");
  std::vector<char> chars((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  std::vector<std::byte> bytes(chars.size());
  for (std::size_t i = 0; i < chars.size(); ++i) {
    bytes[i] = static_cast<std::byte>(chars[i]);
  }
  return bytes;
}

void write_file(const std::string& path, std::span<const std::byte> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::kIoError, "cannot write '" + path + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

NetworkSpec load_network(const std::string& manifest_path,
                         const std::string& weights_path) {
  const auto manifest = read_file(manifest_path);
  const auto weights = read_file(weights_path);
  return parse_network(
      std::string_view(reinterpret_cast<const char*>(manifest.data()),
                       manifest.size()),
      weights);
}

void save_network(const NetworkSpec& net, const std::string& manifest_path,
                  const std::string& weights_path) {
  const std::string manifest = serialize_manifest(net);
  write_file(manifest_path, std::as_bytes(std::span(manifest)));
  const auto weights = net.weights.serialize();
  write_file(weights_path, weights);
}

}  // namespace emacprof
