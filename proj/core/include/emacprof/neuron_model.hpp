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

#ifndef EMACPROF_NEURON_MODEL_HPP_
#define EMACPROF_NEURON_MODEL_HPP_

#include <optional>
#include <string>
#include <string_view>

namespace emacprof {

enum class NeuronKind { kLif, kIfl, kAnnRelu };

std::string_view to_string(NeuronKind kind);
std::optional<NeuronKind> neuron_kind_from_string(std::string_view name);

// Parameters of one neuron population. Times are in seconds; potentials and
// currents are dimensionless. For IFL the weights and bias are the
// dt-scaled quantities (w*dt, b*dt), so dt does not enter the update.
struct NeuronModelSpec {
  NeuronKind kind = NeuronKind::kIfl;
  double tau_syn = 5e-3;
  double tau_mem = 1e-2;
  double dt = 1e-3;
  double v_th = 1.0;
  double bias = 0.0;
  bool spike_once = false;

  bool is_spiking() const { return kind != NeuronKind::kAnnRelu; }

  friend bool operator==(const NeuronModelSpec&,
                         const NeuronModelSpec&) = default;
};

// Returns an empty string when the model is valid, otherwise a diagnostic.
std::string validate(const NeuronModelSpec& model);

}  // namespace emacprof

#endif  // EMACPROF_NEURON_MODEL_HPP_
