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

#ifndef EMACPROF_NEURON_HPP_
#define EMACPROF_NEURON_HPP_

#include <vector>

#include "emacprof/neuron_model.hpp"

namespace emacprof {

// Cost of one operation in EMAC. A MAC touches three operands, an AC two.
inline constexpr double kMacEmac = 1.0;
inline constexpr double kAcEmac = 2.0 / 3.0;

struct NeuronState {
  double i = 0.0;  // synaptic current (dt-scaled for IFL)
  double v = 0.0;  // membrane potential
  bool has_spiked = false;

  friend bool operator==(const NeuronState&, const NeuronState&) = default;
};

struct StepResult {
  NeuronState state;
  bool spike = false;
  // Potential before the reset, i.e. v_{k+1/2}.
  double v_pre_reset = 0.0;
};

namespace detail {

inline StepResult fire(NeuronState next, double v_half,
                       const NeuronModelSpec& model) {
  const bool suppressed = model.spike_once && next.has_spiked;
  const bool spike = !suppressed && v_half >= model.v_th;
  next.v = spike ? v_half - model.v_th : v_half;
  next.has_spiked = next.has_spiked || spike;
  return {next, spike, v_half};
}

}  // namespace detail

// Explicit-Euler LIF step:
//   i' = i - i*dt/tau_syn + input + b
//   v_half = v + (i' - v)*dt/tau_mem
//   spike = v_half >= v_th, v' = v_half - v_th*spike
inline StepResult lif_step(const NeuronState& state, double weighted_input,
                           const NeuronModelSpec& model) {
  NeuronState next = state;
  next.i = state.i - state.i * (model.dt / model.tau_syn) + weighted_input +
           model.bias;
  const double v_half = state.v + (next.i - state.v) * (model.dt / model.tau_mem);
  return detail::fire(next, v_half, model);
}

// Non-leaky IFL step on dt-scaled quantities:
//   i' = i + input + b,  v_half = v + i'
inline StepResult ifl_step(const NeuronState& state, double weighted_input,
                           const NeuronModelSpec& model) {
  NeuronState next = state;
  next.i = state.i + weighted_input + model.bias;
  const double v_half = state.v + next.i;
  return detail::fire(next, v_half, model);
}

inline StepResult neuron_step(const NeuronState& state, double weighted_input,
                              const NeuronModelSpec& model) {
  return model.kind == NeuronKind::kLif
             ? lif_step(state, weighted_input, model)
             : ifl_step(state, weighted_input, model);
}

inline double relu(double x) { return x > 0.0 ? x : 0.0; }

struct EnergyParams {
  double e_syn = 0.0;  // EMAC per synaptic event
  double e_upd = 0.0;  // EMAC per neuron per timestep
};

enum class OpType { kMac, kAc };

struct OpCount {
  OpType op;
  int count;
};

struct OpClassification {
  std::vector<OpCount> update;    // executed every timestep
  std::vector<OpCount> synaptic;  // executed per incoming event
};

// MAC/AC breakdown of one neuron update and one synaptic event.
OpClassification classify_update_ops(NeuronKind kind);

double emac_of(const std::vector<OpCount>& ops);

// EMAC prices per neuron kind; the dot product of classify_update_ops with
// {MAC: 1, AC: 2/3}.
EnergyParams energy_params(NeuronKind kind);

}  // namespace emacprof

#endif  // EMACPROF_NEURON_HPP_
