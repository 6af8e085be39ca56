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

#include "emacprof/neuron.hpp"

namespace emacprof {

OpClassification classify_update_ops(NeuronKind kind) {
  switch (kind) {
    case NeuronKind::kLif:
      // Two decay products (i*dt/tau_syn, (i-v)*dt/tau_mem) folded into
      // accumulations, plus the bias add and the i - v difference.
      return {{{OpType::kMac, 2}, {OpType::kAc, 2}}, {{OpType::kAc, 1}}};
    case NeuronKind::kIfl:
      // i += b, v += i. No leak, no products.
      return {{{OpType::kAc, 2}}, {{OpType::kAc, 1}}};
    case NeuronKind::kAnnRelu:
      return {{}, {{OpType::kMac, 1}}};
  }
  return {};
}

double emac_of(const std::vector<OpCount>& ops) {
  double total = 0.0;
  for (const auto& op : ops) {
    total += op.count * (op.op == OpType::kMac ? kMacEmac : kAcEmac);
  }
  return total;
}

EnergyParams energy_params(NeuronKind kind) {
  const auto ops = classify_update_ops(kind);
  return {emac_of(ops.synaptic), emac_of(ops.update)};
}

}  // namespace emacprof
