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

#include "emacprof/report.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "emacprof/calib.hpp"
#include "emacprof/emac.hpp"
#include "emacprof/neuron.hpp"

namespace emacprof {

using ojson = nlohmann::ordered_json;

std::string format_number(double value) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, p);
}

std::string format_rounded(double value) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), value,
                               std::chars_format::fixed, 3);
  std::string s(buf, p);
  if (s.find('.') != std::string::npos) {
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  if (s == "-0") s = "0";
  return s;
}

namespace {

EnergyParams layer_prices(const NetworkSpec& net, std::size_t l) {
  if (net.layers[l].kind == LayerKind::kMaxPool2D) return {kAcEmac, 0.0};
  if (const auto* m = net.model_of(l)) return energy_params(m->kind);
  return {0.0, 0.0};
}

ojson stat_json(const Stat& s) { return ojson{{"mean", s.mean}, {"std", s.std}}; }

ojson method_json(const NetworkSpec& net, const MethodStats& m) {
  ojson j;
  j["syn"] = stat_json(m.syn);
  j["upd"] = stat_json(m.upd);
  j["rec"] = stat_json(m.rec);
  j["pool"] = stat_json(m.pool);
  j["tot"] = stat_json(m.tot);
  ojson layers = ojson::array();
  for (std::size_t l = 0; l < m.layers.size(); ++l) {
    const auto& s = m.layers[l];
    layers.push_back({{"layer", l},
                      {"name", net.layers[l].name},
                      {"kind", to_string(net.layers[l].kind)},
                      {"syn", stat_json(s.syn)},
                      {"upd", stat_json(s.upd)},
                      {"rec", stat_json(s.rec)},
                      {"tot", stat_json(s.tot)}});
  }
  j["layers"] = std::move(layers);
  return j;
}

}  // namespace

std::string inspect_report(const NetworkSpec& net) {
  std::ostringstream out;
  const auto counts = structural_counts(net);
  double upd_per_step = 0.0;
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const auto& layer = net.layers[l];
    const auto& c = counts[l];
    const auto e = layer_prices(net, l);
    const auto* m = net.model_of(l);
    out << l << " " << layer.name << ": " << to_string(layer.kind)
        << "  n_n=" << c.n_n << " n_s=" << c.n_s << " e=("
        << format_rounded(e.e_syn) << "," << format_rounded(e.e_upd) << ")"
        << " n_sr=" << c.n_sr << " model=" << (m ? to_string(m->kind) : "-")
        << " out=" << to_string(layer.output_shape);
    if (layer.padding.amount() > 0) out << " approximate";
    out << "\n";
    if (m && m->is_spiking()) upd_per_step += static_cast<double>(c.n_n) * e.e_upd;
  }
  out << "MAC=" << ann_mac_count(net) << "\n";
  out << "E_upd_per_step=" << format_rounded(upd_per_step) << "\n";
  out << "coding=" << to_string(net.coding) << " T_max=" << net.max_timesteps << "\n";
  return out.str();
}

std::string profile_json(const NetworkSpec& net, const AggregateStats& stats,
                         const ProfileInfo& info) {
  ojson j;
  j["network"] = info.network;
  j["coding"] = to_string(net.coding);
  j["encoding"] = info.encoding;
  j["seed"] = info.seed;
  j["encoder_per_step"] = info.encoder_per_step;
  j["samples"] = stats.results.size();
  j["unit"] = "EMAC";
  j["analytic"] = method_json(net, stats.analytic);
  j["exact_events"] = method_json(net, stats.exact);
  j["t_used"] = stat_json(stats.t_used);
  j["total_spikes"] = stat_json(stats.total_spikes);
  j["S"] = stat_json(stats.synaptic_events);
  j["U"] = stats.t_used.mean * weighted_update_neurons(net);
  ojson failures = ojson::array();
  for (const auto& f : stats.failures) {
    failures.push_back({{"sample", f.index}, {"error", f.message}});
  }
  j["failures"] = std::move(failures);
  return j.dump(2) + "\n";
}

std::string spikes_csv(const NetworkSpec& net, const AggregateStats& stats) {
  std::string out = "layer,name,kind,n_n,spikes_mean,spikes_std\n";
  const auto counts = structural_counts(net);
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const auto& s = stats.exact.layers.empty() ? Stat{} : stats.exact.layers[l].spikes;
    out += std::to_string(l) + "," + net.layers[l].name + "," +
           std::string(to_string(net.layers[l].kind)) + "," +
           std::to_string(counts[l].n_n) + "," + format_number(s.mean) + "," +
           format_number(s.std) + "\n";
  }
  return out;
}

std::string latency_csv(const AggregateStats& stats) {
  std::string out = "sample,t_used,class,fallback\n";
  for (std::size_t k = 0; k < stats.results.size(); ++k) {
    const auto& r = stats.results[k];
    out += std::to_string(stats.sample_index[k]) + "," +
           std::to_string(r.trace.t_used) + "," +
           std::to_string(r.decision.class_index) + "," +
           (r.decision.fallback_used ? "1" : "0") + "\n";
  }
  return out;
}

std::string energy_csv(const NetworkSpec& net, const AggregateStats& stats) {
  std::string out = "method,layer,component,mean,std\n";
  auto emit = [&out](std::string_view method, const std::string& layer,
                     const char* component, const Stat& s) {
    out += std::string(method) + "," + layer + "," + component + "," +
           format_number(s.mean) + "," + format_number(s.std) + "\n";
  };
  const std::pair<EnergyMethod, const MethodStats*> methods[] = {
      {EnergyMethod::kAnalytic, &stats.analytic},
      {EnergyMethod::kExactEvents, &stats.exact}};
  for (const auto& [method, m] : methods) {
    const auto name = to_string(method);
    for (std::size_t l = 0; l < m->layers.size(); ++l) {
      const auto& layer = net.layers[l].name;
      emit(name, layer, "syn", m->layers[l].syn);
      emit(name, layer, "upd", m->layers[l].upd);
      emit(name, layer, "rec", m->layers[l].rec);
      emit(name, layer, "tot", m->layers[l].tot);
    }
    emit(name, "total", "syn", m->syn);
    emit(name, "total", "upd", m->upd);
    emit(name, "total", "rec", m->rec);
    emit(name, "total", "pool", m->pool);
    emit(name, "total", "tot", m->tot);
  }
  return out;
}

std::string energy_report_json(const NetworkSpec& net, const EnergyReport& report) {
  ojson j;
  j["method"] = to_string(report.method);
  j["t_used"] = report.t_used;
  j["E_syn"] = report.syn;
  j["E_upd"] = report.upd;
  j["E_rec"] = report.rec;
  j["E_pool"] = report.pool;
  j["E_syn_plus_rec"] = report.synaptic_total();
  j["E_tot"] = report.tot;
  ojson layers = ojson::array();
  for (std::size_t l = 0; l < report.layers.size(); ++l) {
    const auto& e = report.layers[l];
    layers.push_back({{"layer", l},
                      {"name", net.layers[l].name},
                      {"E_syn", e.syn},
                      {"E_upd", e.upd},
                      {"E_rec", e.rec},
                      {"pool", e.pool},
                      {"approximate", e.approximate}});
  }
  j["layers"] = std::move(layers);
  return j.dump(2) + "\n";
}

std::string energy_report_csv(const NetworkSpec& net, const EnergyReport& report) {
  std::string out = "layer,component,emac\n";
  auto emit = [&out](const std::string& layer, const char* component, double v) {
    out += layer + "," + component + "," + format_number(v) + "\n";
  };
  for (std::size_t l = 0; l < report.layers.size(); ++l) {
    const auto& e = report.layers[l];
    emit(net.layers[l].name, "syn", e.syn);
    emit(net.layers[l].name, "upd", e.upd);
    emit(net.layers[l].name, "rec", e.rec);
  }
  emit("total", "syn", report.syn);
  emit("total", "upd", report.upd);
  emit("total", "rec", report.rec);
  emit("total", "pool", report.pool);
  emit("total", "tot", report.tot);
  return out;
}

std::string trace_csv(const SpikeTrace& trace) {
  std::string out = "layer,t,spike_count\n";
  for (std::size_t l = 0; l < trace.num_layers(); ++l) {
    for (std::size_t t = 0; t < trace.counts[l].size(); ++t) {
      out += std::to_string(l) + "," + std::to_string(t + 1) + "," +
             std::to_string(trace.counts[l][t]) + "\n";
    }
  }
  return out;
}

std::string raster_csv(const SpikeTrace& trace) {
  std::string out = "layer,neuron,t\n";
  if (!trace.raster) return out;
  for (std::size_t l = 0; l < trace.raster->size(); ++l) {
    const auto& r = (*trace.raster)[l];
    for (std::size_t t = 0; t < r.steps(); ++t) {
      for (std::size_t n = 0; n < r.neurons(); ++n) {
        if (r.at(n, t)) {
          out += std::to_string(l) + "," + std::to_string(n) + "," +
                 std::to_string(t + 1) + "\n";
        }
      }
    }
  }
  return out;
}

std::string trace_summary_json(const NetworkSpec& net,
                               const InferenceResult& result) {
  ojson j;
  j["t_used"] = result.trace.t_used;
  j["class"] = result.decision.class_index;
  j["latency"] = result.decision.latency_t;
  j["fallback"] = result.decision.fallback_used;
  ojson layers = ojson::array();
  const auto counts = structural_counts(net);
  for (std::size_t l = 0; l < result.trace.num_layers(); ++l) {
    layers.push_back({{"layer", l},
                      {"name", net.layers[l].name},
                      {"n_n", counts[l].n_n},
                      {"spikes", result.trace.layer_spikes(l)},
                      {"feedforward_events", result.trace.feedforward_events[l]},
                      {"recurrent_events", result.trace.recurrent_events[l]}});
  }
  j["layers"] = std::move(layers);
  j["analytic"] = nlohmann::ordered_json::parse(energy_report_json(net, result.analytic));
  j["exact_events"] = nlohmann::ordered_json::parse(energy_report_json(net, result.exact));
  return j.dump(2) + "\n";
}

}  // namespace emacprof
