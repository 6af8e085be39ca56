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

#ifndef EMACPROF_EMAC_HPP_
#define EMACPROF_EMAC_HPP_

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "emacprof/netspec.hpp"
#include "emacprof/neuron.hpp"
#include "emacprof/trace.hpp"

namespace emacprof {

enum class EnergyMethod { kAnalytic, kExactEvents };

std::string_view to_string(EnergyMethod method);

struct LayerEnergy {
  double syn = 0.0;  // feedforward synaptic work (includes pooling)
  double upd = 0.0;  // neuron updates
  double rec = 0.0;  // recurrent synaptic work
  bool pool = false;         // syn is spike max-pooling work
  bool approximate = false;  // zero padding: analytic fanin overcounts

  double total() const { return syn + upd + rec; }
};

// Energy of one inference in EMAC. tot = syn + upd + rec; `pool` is the part
// of `syn` spent in spike max-pooling, reported so it can be excluded.
struct EnergyReport {
  std::vector<LayerEnergy> layers;
  double syn = 0.0;
  double upd = 0.0;
  double rec = 0.0;
  double pool = 0.0;
  double tot = 0.0;
  std::int64_t t_used = 0;
  EnergyMethod method = EnergyMethod::kAnalytic;

  // s * e_syn in the two-term decomposition.
  double synaptic_total() const { return syn + rec; }
};

// Average spikes per neuron per inference. `input` is the rate of the
// encoded input when it is spiking and empty for analog input.
struct LayerRates {
  std::optional<double> input;
  std::vector<double> layer;
};

struct EnergyOptions {
  // Price the analog-fed layer's weighted sums every timestep instead of
  // once per inference.
  bool encoder_per_step = false;
};

// E_syn(l) = n_s n_n f(l-1) e_syn, E_rec(l) = n_sr n_n f(l) e_syn,
// E_upd(l) = T n_n e_upd. Analog layers are priced as n_s n_n MACs.
EnergyReport emac_analytic(const NetworkSpec& net, const LayerRates& rates,
                           std::int64_t t_used,
                           const EnergyOptions& options = {});

// Same pricing applied to the realized event counts of a trace.
EnergyReport emac_exact(const NetworkSpec& net, const SpikeTrace& trace,
                        const EnergyOptions& options = {});

LayerRates rates_from_trace(const SpikeTrace& trace, const NetworkSpec& net);

// Classical MAC count: sum over layers of n_s * n_n.
std::int64_t ann_mac_count(const NetworkSpec& net);

}  // namespace emacprof

#endif  // EMACPROF_EMAC_HPP_
