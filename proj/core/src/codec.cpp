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

#include "emacprof/codec.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include "emacprof/errors.hpp"

namespace emacprof {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

double counter_uniform(std::uint64_t seed, std::uint64_t pixel,
                       std::uint64_t t) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ pixel);
  h = splitmix64(h ^ (t * 0xd1b54a32d192ed03ULL));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

bool EncodedInput::spikes(std::size_t pixel, std::int64_t t) const {
  return counter_uniform(seed, pixel, static_cast<std::uint64_t>(t)) <
         static_cast<double>(values[pixel]);
}

EncodedInput encode(const Tensor& input, const Shape& expected_shape,
                    EncodingMode mode, std::uint64_t seed) {
  const bool same = input.shape == expected_shape;
  const bool flat_match = input.shape.size() == 1 &&
                          input.shape[0] == num_elements(expected_shape);
  if ((!same && !flat_match) ||
      static_cast<std::int64_t>(input.values.size()) !=
          num_elements(expected_shape)) {
    throw Error(Errc::kShapeMismatch, "input shape " + to_string(input.shape) +
                                          " does not match network input " +
                                          to_string(expected_shape));
  }
  for (std::size_t k = 0; k < input.values.size(); ++k) {
    const float v = input.values[k];
    if (mode == EncodingMode::kPoissonSpikes) {
      if (!(v >= 0.0f && v <= 1.0f)) {
        throw Error(Errc::kRateOutOfRange,
                    "value " + std::to_string(v) + " at index " +
                        std::to_string(k) + " outside [0,1]");
      }
    } else if (!std::isfinite(v)) {
      throw Error(Errc::kInvalidInput,
                  "non-finite value at index " + std::to_string(k));
    }
  }
  return {mode, expected_shape, input.values, seed};
}

void Raster::push_step(std::span<const std::uint8_t> spikes) {
  data_.insert(data_.end(), spikes.begin(), spikes.end());
}

void VoltageHistory::push_step(std::span<const double> voltages) {
  data_.insert(data_.end(), voltages.begin(), voltages.end());
}

Decision decode_max_membrane(const VoltageHistory& history) {
  if (history.neurons() == 0 || history.steps() == 0) {
    throw Error(Errc::kEmptyHistory, "no voltage history to decode");
  }
  std::size_t best = 0;
  double best_peak = -std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < history.neurons(); ++n) {
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < history.steps(); ++t) {
      peak = std::max(peak, history.at(n, t));
    }
    if (peak > best_peak) {
      best_peak = peak;
      best = n;
    }
  }
  return {static_cast<std::int64_t>(best),
          static_cast<std::int64_t>(history.steps()), false};
}

Decision decode_roc(const Raster& raster, const VoltageHistory& history) {
  if (raster.neurons() == 0 || raster.steps() == 0) {
    throw Error(Errc::kEmptyRaster, "no output raster to decode");
  }
  for (std::size_t t = 0; t < raster.steps(); ++t) {
    for (std::size_t n = 0; n < raster.neurons(); ++n) {
      if (raster.at(n, t)) {
        return {static_cast<std::int64_t>(n), static_cast<std::int64_t>(t + 1),
                false};
      }
    }
  }
  Decision d = decode_max_membrane(history);
  d.fallback_used = true;
  d.latency_t = static_cast<std::int64_t>(raster.steps());
  return d;
}

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kIoError, "cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Tensor parse_bin(const std::string& bytes, const std::string& path) {
  const auto eol = bytes.find('\n');
  if (eol == std::string::npos || bytes.compare(0, 6, "shape=") != 0) {
    throw Error(Errc::kInvalidInput, path + ": missing 'shape=' header line");
  }
  Tensor t;
  std::stringstream dims(bytes.substr(6, eol - 6));
  std::string item;
  while (std::getline(dims, item, ',')) {
    std::int64_t d = 0;
    auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), d);
    if (ec != std::errc{} || d <= 0) {
      throw Error(Errc::kInvalidInput, path + ": bad shape header");
    }
    t.shape.push_back(d);
  }
  const std::size_t payload = bytes.size() - eol - 1;
  const auto count = static_cast<std::size_t>(num_elements(t.shape));
  if (payload != 4 * count) {
    throw Error(Errc::kShapeMismatch,
                path + ": payload holds " + std::to_string(payload / 4) +
                    " floats, header says " + std::to_string(count));
  }
  t.values.resize(count);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + eol + 1);
  for (std::size_t k = 0; k < count; ++k) {
    std::uint32_t bits = 0;
    for (int b = 0; b < 4; ++b) bits |= std::uint32_t{p[4 * k + b]} << (8 * b);
    t.values[k] = std::bit_cast<float>(bits);
  }
  return t;
}

Tensor parse_csv(const std::string& text, const std::string& path) {
  Tensor t;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto end = text.find_first_of(",\n\r \t", pos);
    const auto stop = end == std::string::npos ? text.size() : end;
    if (stop > pos) {
      float v = 0;
      auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + stop, v);
      if (ec != std::errc{} || ptr != text.data() + stop) {
        throw Error(Errc::kInvalidInput,
                    path + ": cannot parse '" + text.substr(pos, stop - pos) + "'");
      }
      t.values.push_back(v);
    }
    pos = stop + 1;
  }
  t.shape = {static_cast<std::int64_t>(t.values.size())};
  return t;
}

}  // namespace

Tensor read_tensor_file(const std::string& path) {
  const auto ext = std::filesystem::path(path).extension().string();
  if (ext == ".bin") return parse_bin(slurp(path), path);
  if (ext == ".csv") return parse_csv(slurp(path), path);
  throw Error(Errc::kInvalidInput, path + ": expected a .bin or .csv input");
}

void write_tensor_bin(const Tensor& tensor, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::kIoError, "cannot write '" + path + "'");
  out << "shape=";
  for (std::size_t k = 0; k < tensor.shape.size(); ++k) {
    out << (k ? "," : "") << tensor.shape[k];
  }
  out << '\n';
  for (float v : tensor.values) {
    const auto bits = std::bit_cast<std::uint32_t>(v);
    for (int b = 0; b < 4; ++b) out.put(static_cast<char>((bits >> (8 * b)) & 0xff));
  }
}

std::vector<std::string> list_input_files(const std::string& path) {
  namespace fs = std::filesystem;
  std::vector<std::string> files;
  if (fs::is_directory(path)) {
    for (const auto& entry : fs::directory_iterator(path)) {
      const auto ext = entry.path().extension();
      if (entry.is_regular_file() && (ext == ".bin" || ext == ".csv")) {
        files.push_back(entry.path().string());
      }
    }
    std::sort(files.begin(), files.end());
  } else if (fs::exists(path)) {
    files.push_back(path);
  } else {
    throw Error(Errc::kIoError, "input path '" + path + "' does not exist");
  }
  return files;
}

}  // namespace emacprof
