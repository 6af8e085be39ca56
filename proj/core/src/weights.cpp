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

#include "emacprof/weights.hpp"

#include <bit>
#include <cstring>

#include "emacprof/errors.hpp"

namespace emacprof {
namespace {

constexpr char kMagic[4] = {'E', 'M', 'W', 'T'};

template <typename T>
void put_le(std::vector<std::byte>& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<std::byte>((value >> (8 * i)) & 0xff));
  }
}

class Reader {
 public:
  explicit Reader(std::span<const std::byte> bytes) : bytes_(bytes) {}

  template <typename T>
  T le() {
    need(sizeof(T));
    T value = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      value |= static_cast<T>(std::to_integer<std::uint8_t>(bytes_[pos_ + i]))
               << (8 * i);
    }
    pos_ += sizeof(T);
    return value;
  }

  std::string str(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) {
      throw Error(Errc::kSchemaError, "weights container truncated");
    }
  }

  std::span<const std::byte> bytes_;
  std::size_t pos_ = 0;
};

float float_from_le(const std::byte* p) {
  std::uint32_t bits = 0;
  for (int i = 0; i < 4; ++i) {
    bits |= static_cast<std::uint32_t>(std::to_integer<std::uint8_t>(p[i]))
            << (8 * i);
  }
  return std::bit_cast<float>(bits);
}

}  // namespace

void WeightStore::set(const std::string& name, std::vector<float> values) {
  tensors_[name] = std::move(values);
}

bool WeightStore::contains(const std::string& name) const {
  return tensors_.contains(name);
}

std::span<const float> WeightStore::get(const std::string& name) const {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) {
    throw Error(Errc::kUnknownRef, "no weight tensor named '" + name + "'");
  }
  return it->second;
}

std::vector<float>& WeightStore::mutable_tensor(const std::string& name) {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) {
    throw Error(Errc::kUnknownRef, "no weight tensor named '" + name + "'");
  }
  return it->second;
}

std::vector<std::byte> WeightStore::serialize() const {
  std::vector<std::byte> out;
  for (char c : kMagic) out.push_back(static_cast<std::byte>(c));
  put_le<std::uint32_t>(out, kVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(tensors_.size()));

  std::uint64_t directory_size = 12;
  for (const auto& [name, values] : tensors_) {
    directory_size += 4 + name.size() + 8 + 8;
  }
  std::uint64_t offset = directory_size;
  for (const auto& [name, values] : tensors_) {
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    for (char c : name) out.push_back(static_cast<std::byte>(c));
    put_le<std::uint64_t>(out, offset);
    put_le<std::uint64_t>(out, values.size());
    offset += 4 * values.size();
  }
  for (const auto& [name, values] : tensors_) {
    for (float v : values) put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(v));
  }
  return out;
}

WeightStore WeightStore::parse(std::span<const std::byte> bytes) {
  Reader reader(bytes);
  if (reader.str(4) != std::string(kMagic, 4)) {
    throw Error(Errc::kSchemaError, "weights container: bad magic");
  }
  const auto version = reader.le<std::uint32_t>();
  if (version != kVersion) {
    throw Error(Errc::kSchemaError, "weights container: unsupported version " +
                                        std::to_string(version));
  }
  const auto count = reader.le<std::uint32_t>();
  WeightStore store;
  for (std::uint32_t e = 0; e < count; ++e) {
    const auto name_len = reader.le<std::uint32_t>();
    std::string name = reader.str(name_len);
    const auto offset = reader.le<std::uint64_t>();
    const auto elements = reader.le<std::uint64_t>();
    if (offset > bytes.size() || elements > (bytes.size() - offset) / 4) {
      throw Error(Errc::kSchemaError,
                  "weights container: entry '" + name + "' out of bounds");
    }
    if (store.contains(name)) {
      throw Error(Errc::kSchemaError,
                  "weights container: duplicate entry '" + name + "'");
    }
    std::vector<float> values(elements);
    for (std::uint64_t i = 0; i < elements; ++i) {
      values[i] = float_from_le(bytes.data() + offset + 4 * i);
    }
    store.set(name, std::move(values));
  }
  return store;
}

bool operator==(const WeightStore& a, const WeightStore& b) {
  if (a.tensors_.size() != b.tensors_.size()) return false;
  for (auto ia = a.tensors_.begin(), ib = b.tensors_.begin();
       ia != a.tensors_.end(); ++ia, ++ib) {
    if (ia->first != ib->first || ia->second.size() != ib->second.size()) {
      return false;
    }
    // Bitwise, so NaN payloads and signed zeros count.
    if (std::memcmp(ia->second.data(), ib->second.data(),
                    ia->second.size() * sizeof(float)) != 0) {
      return false;
    }
  }
  return true;
}

}  // namespace emacprof
