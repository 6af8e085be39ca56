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

#include "emacprof/emac.hpp"

#include <cmath>

#include "emacprof/errors.hpp"

namespace emacprof {

std::string_view to_string(EnergyMethod method) {
  return method == EnergyMethod::kAnalytic ? "analytic" : "exact_events";
}

namespace {

// Per-event price of feedforward work into layer `l` given its role.
double feedforward_price(const NetworkSpec& net, std::size_t l, LayerRole role) {
  if (role != LayerRole::kSpiking) return kMacEmac;
  if (net.layers[l].kind == LayerKind::kMaxPool2D) return kAcEmac;
  const auto* model = net.model_of(l);
  return model ? energy_params(model->kind).e_syn : 0.0;
}

void finish(EnergyReport& report) {
  for (const auto& e : report.layers) {
    report.syn += e.syn;
    report.upd += e.upd;
    report.rec += e.rec;
    if (e.pool) report.pool += e.syn;
  }
  report.tot = report.syn + report.upd + report.rec;
}

// Update and recurrent terms shared by both methods.
void price_neurons(const NetworkSpec& net, std::size_t l, LayerRole role,
                   std::int64_t n_n, std::int64_t t_used, LayerEnergy& e) {
  const auto* model = net.model_of(l);
  if (!model || role == LayerRole::kStatic) return;
  e.upd = static_cast<double>(t_used) * static_cast<double>(n_n) *
          energy_params(model->kind).e_upd;
}

}  // namespace

EnergyReport emac_analytic(const NetworkSpec& net, const LayerRates& rates,
                           std::int64_t t_used, const EnergyOptions& options) {
  if (rates.layer.size() != net.layers.size()) {
    throw Error(Errc::kMissingRates,
                "expected " + std::to_string(net.layers.size()) +
                    " layer rates, got " + std::to_string(rates.layer.size()));
  }
  const auto roles = layer_roles(net, !rates.input.has_value());
  const auto counts = structural_counts(net);

  EnergyReport report;
  report.method = EnergyMethod::kAnalytic;
  report.t_used = t_used;
  report.layers.resize(net.layers.size());
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const auto& layer = net.layers[l];
    const auto& c = counts[l];
    auto& e = report.layers[l];
    const double fanin_total = static_cast<double>(c.n_s) * static_cast<double>(c.n_n);
    e.approximate = layer.padding.mode == Padding::Mode::kZero &&
                    layer.padding.pad > 0;

    switch (roles[l]) {
      case LayerRole::kStatic:
        e.syn = fanin_total * kMacEmac;
        break;
      case LayerRole::kAnalogFed:
        e.syn = fanin_total * kMacEmac *
                (options.encoder_per_step ? static_cast<double>(t_used) : 1.0);
        break;
      case LayerRole::kSpiking: {
        std::optional<double> f_prev =
            l == 0 ? rates.input : std::optional<double>(rates.layer[l - 1]);
        if (!f_prev || !std::isfinite(*f_prev) || *f_prev < 0) {
          throw Error(Errc::kMissingRates,
                      "no valid presynaptic rate for layer " + std::to_string(l));
        }
        e.syn = fanin_total * *f_prev * feedforward_price(net, l, roles[l]);
        e.pool = layer.kind == LayerKind::kMaxPool2D;
        break;
      }
    }
    price_neurons(net, l, roles[l], c.n_n, t_used, e);
    if (c.n_sr > 0) {
      const double f_self = rates.layer[l];
      if (!std::isfinite(f_self) || f_self < 0) {
        throw Error(Errc::kMissingRates,
                    "no valid rate for recurrent layer " + std::to_string(l));
      }
      e.rec = static_cast<double>(c.n_sr) * static_cast<double>(c.n_n) *
              f_self * energy_params(net.model_of(l)->kind).e_syn;
    }
  }
  finish(report);
  return report;
}

EnergyReport emac_exact(const NetworkSpec& net, const SpikeTrace& trace,
                        const EnergyOptions& options) {
  const std::size_t L = net.layers.size();
  if (trace.num_layers() != L || trace.feedforward_events.size() != L ||
      trace.recurrent_events.size() != L) {
    throw Error(Errc::kTraceNetMismatch,
                "trace has " + std::to_string(trace.num_layers()) +
                    " layers, network has " + std::to_string(L));
  }
  const auto roles = layer_roles(net, trace.input_analog);
  const auto counts = structural_counts(net);
  for (std::size_t l = 0; l < L; ++l) {
    if (static_cast<std::int64_t>(trace.counts[l].size()) != trace.t_used) {
      throw Error(Errc::kTraceNetMismatch,
                  "layer " + std::to_string(l) + " has " +
                      std::to_string(trace.counts[l].size()) +
                      " timesteps, trace says " + std::to_string(trace.t_used));
    }
    for (auto n : trace.counts[l]) {
      if (n > counts[l].n_n) {
        throw Error(Errc::kTraceNetMismatch,
                    "layer " + std::to_string(l) + " spike count exceeds n_n");
      }
    }
  }

  EnergyReport report;
  report.method = EnergyMethod::kExactEvents;
  report.t_used = trace.t_used;
  report.layers.resize(L);
  for (std::size_t l = 0; l < L; ++l) {
    auto& e = report.layers[l];
    double events = static_cast<double>(trace.feedforward_events[l]);
    if (roles[l] == LayerRole::kAnalogFed && options.encoder_per_step) {
      events *= static_cast<double>(trace.t_used);
    }
    e.syn = events * feedforward_price(net, l, roles[l]);
    e.pool = roles[l] == LayerRole::kSpiking &&
             net.layers[l].kind == LayerKind::kMaxPool2D;
    price_neurons(net, l, roles[l], counts[l].n_n, trace.t_used, e);
    if (trace.recurrent_events[l] > 0) {
      e.rec = static_cast<double>(trace.recurrent_events[l]) *
              energy_params(net.model_of(l)->kind).e_syn;
    }
  }
  finish(report);
  return report;
}

LayerRates rates_from_trace(const SpikeTrace& trace, const NetworkSpec& net) {
  const auto roles = layer_roles(net, trace.input_analog);
  const auto counts = structural_counts(net);
  LayerRates rates;
  if (!trace.input_analog) {
    rates.input = static_cast<double>(trace.input_spikes) /
                  static_cast<double>(num_elements(net.input_shape()));
  }
  rates.layer.resize(net.layers.size(), 0.0);
  for (std::size_t l = 0; l < net.layers.size() && l < trace.num_layers(); ++l) {
    rates.layer[l] = roles[l] == LayerRole::kStatic
                         ? 1.0
                         : static_cast<double>(trace.layer_spikes(l)) /
                               static_cast<double>(counts[l].n_n);
  }
  return rates;
}

std::int64_t ann_mac_count(const NetworkSpec& net) {
  std::int64_t total = 0;
  for (const auto& c : structural_counts(net)) total += c.n_s * c.n_n;
  return total;
}

}  // namespace emacprof
