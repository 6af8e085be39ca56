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

#ifndef EMACPROF_WEIGHTS_HPP_
#define EMACPROF_WEIGHTS_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace emacprof {

// Named float32 tensors, stored flat in row-major order.
//
// On disk (EMWT container, all integers little-endian):
//   "EMWT" | u32 version (=1) | u32 entry count
//   per entry: u32 name length | name bytes | u64 byte offset | u64 count
//   payload: IEEE-754 binary32 values
// Byte offsets are absolute from the start of the file. Entries are written
// in name order, payload blocks back to back after the directory.
class WeightStore {
 public:
  static constexpr std::uint32_t kVersion = 1;

  void set(const std::string& name, std::vector<float> values);
  bool contains(const std::string& name) const;
  std::span<const float> get(const std::string& name) const;
  std::vector<float>& mutable_tensor(const std::string& name);

  const std::map<std::string, std::vector<float>>& tensors() const {
    return tensors_;
  }
  std::size_t size() const { return tensors_.size(); }

  std::vector<std::byte> serialize() const;
  static WeightStore parse(std::span<const std::byte> bytes);

  friend bool operator==(const WeightStore& a, const WeightStore& b);

 private:
  std::map<std::string, std::vector<float>> tensors_;
};

}  // namespace emacprof

#endif  // EMACPROF_WEIGHTS_HPP_
