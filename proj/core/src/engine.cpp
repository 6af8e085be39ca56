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

#include "emacprof/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

#include "emacprof/errors.hpp"
#include "emacprof/neuron.hpp"

namespace emacprof {
namespace {

using Index = std::uint32_t;

// Output positions along one axis whose window covers input coordinate `y`.
struct AxisRange {
  std::int64_t lo, hi;  // inclusive; empty when lo > hi
};

AxisRange covering(std::int64_t y, int kernel, int stride, int pad,
                   std::int64_t extent) {
  const std::int64_t num = y + pad - kernel + 1;
  const std::int64_t lo = num <= 0 ? 0 : (num + stride - 1) / stride;
  const std::int64_t hi = std::min<std::int64_t>(extent - 1, (y + pad) / stride);
  return {lo, hi};
}

[[noreturn]] void non_finite(std::size_t layer, std::size_t neuron,
                             std::int64_t t) {
  throw Error(Errc::kNonFiniteState,
              "layer " + std::to_string(layer) + " neuron " +
                  std::to_string(neuron) + " at t=" + std::to_string(t));
}

std::vector<float> transpose(std::span<const float> w, std::int64_t rows,
                             std::int64_t cols) {
  std::vector<float> t(w.size());
  for (std::int64_t r = 0; r < rows; ++r) {
    for (std::int64_t c = 0; c < cols; ++c) t[c * rows + r] = w[r * cols + c];
  }
  return t;
}

}  // namespace

struct Engine::Impl {
  NetworkSpec net;
  std::vector<LayerCounts> counts;
  std::vector<std::vector<float>> ff_transposed;   // Dense, RecurrentDense
  std::vector<std::vector<float>> rec_transposed;  // RecurrentDense

  explicit Impl(const NetworkSpec& spec) : net(spec), counts(structural_counts(spec)) {
    ff_transposed.resize(net.layers.size());
    rec_transposed.resize(net.layers.size());
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
      const auto& layer = net.layers[l];
      const auto n_in = num_elements(layer.input_shape);
      const auto n_out = counts[l].n_n;
      if (layer.kind == LayerKind::kDense || layer.kind == LayerKind::kRecurrentDense) {
        ff_transposed[l] = transpose(net.weights_of(l), n_out, n_in);
      }
      if (layer.kind == LayerKind::kRecurrentDense) {
        rec_transposed[l] = transpose(net.recurrent_weights_of(l), n_out, n_out);
      }
    }
  }

  // Weighted sums of analog data into layer l; books one event per realized
  // connection.
  std::vector<double> analog_sums(std::size_t l, const std::vector<double>& x,
                                  std::uint64_t& events) const {
    const auto& layer = net.layers[l];
    const auto& in = layer.input_shape;
    const auto& out = layer.output_shape;
    const auto n_out = counts[l].n_n;
    const auto n_in = num_elements(in);
    std::vector<double> y(n_out, 0.0);
    switch (layer.kind) {
      case LayerKind::kDense:
      case LayerKind::kRecurrentDense: {
        const auto w = net.weights_of(l);
        for (std::int64_t j = 0; j < n_out; ++j) {
          double acc = 0.0;
          for (std::int64_t i = 0; i < n_in; ++i) acc += w[j * n_in + i] * x[i];
          y[j] = acc;
        }
        events += static_cast<std::uint64_t>(n_out * n_in);
        break;
      }
      case LayerKind::kConv2D: {
        const auto w = net.weights_of(l);
        const int kh = layer.kernel[0], kw = layer.kernel[1];
        const int sh = layer.stride[0], sw = layer.stride[1];
        const int p = layer.padding.amount();
        for (std::int64_t f = 0; f < out[0]; ++f) {
          for (std::int64_t oy = 0; oy < out[1]; ++oy) {
            for (std::int64_t ox = 0; ox < out[2]; ++ox) {
              double acc = 0.0;
              for (std::int64_t c = 0; c < in[0]; ++c) {
                for (int ky = 0; ky < kh; ++ky) {
                  const std::int64_t iy = oy * sh - p + ky;
                  if (iy < 0 || iy >= in[1]) continue;
                  for (int kx = 0; kx < kw; ++kx) {
                    const std::int64_t ix = ox * sw - p + kx;
                    if (ix < 0 || ix >= in[2]) continue;
                    acc += w[((f * in[0] + c) * kh + ky) * kw + kx] *
                           x[(c * in[1] + iy) * in[2] + ix];
                    ++events;
                  }
                }
              }
              y[(f * out[1] + oy) * out[2] + ox] = acc;
            }
          }
        }
        break;
      }
      case LayerKind::kLocallyConnected: {
        const auto w = net.weights_of(l);
        for (std::int64_t f = 0; f < out[0]; ++f) {
          for (std::int64_t oy = 0; oy < out[1]; ++oy) {
            for (std::int64_t ox = 0; ox < out[2]; ++ox) {
              const std::int64_t j = (f * out[1] + oy) * out[2] + ox;
              double acc = 0.0;
              for (std::int64_t c = 0; c < in[0]; ++c) {
                for (int ky = 0; ky < layer.kernel[0]; ++ky) {
                  for (int kx = 0; kx < layer.kernel[1]; ++kx) {
                    const std::int64_t i =
                        (c * in[1] + oy * layer.stride[0] + ky) * in[2] +
                        ox * layer.stride[1] + kx;
                    acc += w[j * n_in + i] * x[i];
                  }
                }
              }
              y[j] = acc;
            }
          }
        }
        events += static_cast<std::uint64_t>(n_out * counts[l].n_s);
        break;
      }
      case LayerKind::kMaxPool2D: {
        for (std::int64_t c = 0; c < out[0]; ++c) {
          for (std::int64_t oy = 0; oy < out[1]; ++oy) {
            for (std::int64_t ox = 0; ox < out[2]; ++ox) {
              double m = -std::numeric_limits<double>::infinity();
              for (int ky = 0; ky < layer.kernel[0]; ++ky) {
                for (int kx = 0; kx < layer.kernel[1]; ++kx) {
                  m = std::max(m, x[(c * in[1] + oy * layer.stride[0] + ky) * in[2] +
                                    ox * layer.stride[1] + kx]);
                }
              }
              y[(c * out[1] + oy) * out[2] + ox] = m;
            }
          }
        }
        events += static_cast<std::uint64_t>(n_out * counts[l].n_s);
        break;
      }
      case LayerKind::kFlatten:
        y = x;
        break;
    }
    return y;
  }

  // Accumulates the weights of presynaptic spikes `pre` into `drive`.
  void scatter(std::size_t l, const std::vector<Index>& pre,
               std::vector<double>& drive, std::uint64_t& events) const {
    const auto& layer = net.layers[l];
    const auto& in = layer.input_shape;
    const auto& out = layer.output_shape;
    const auto n_out = counts[l].n_n;
    switch (layer.kind) {
      case LayerKind::kDense:
      case LayerKind::kRecurrentDense: {
        const auto& wt = ff_transposed[l];
        for (Index i : pre) {
          const float* row = wt.data() + static_cast<std::int64_t>(i) * n_out;
          for (std::int64_t j = 0; j < n_out; ++j) drive[j] += row[j];
        }
        events += pre.size() * static_cast<std::uint64_t>(n_out);
        break;
      }
      case LayerKind::kConv2D: {
        const auto w = net.weights_of(l);
        const int kh = layer.kernel[0], kw = layer.kernel[1];
        const int sh = layer.stride[0], sw = layer.stride[1];
        const int p = layer.padding.amount();
        const std::int64_t hw = in[1] * in[2];
        for (Index i : pre) {
          const std::int64_t c = i / hw;
          const std::int64_t y = (i % hw) / in[2];
          const std::int64_t x = i % in[2];
          const auto ry = covering(y, kh, sh, p, out[1]);
          const auto rx = covering(x, kw, sw, p, out[2]);
          for (std::int64_t oy = ry.lo; oy <= ry.hi; ++oy) {
            const std::int64_t ky = y + p - oy * sh;
            for (std::int64_t ox = rx.lo; ox <= rx.hi; ++ox) {
              const std::int64_t kx = x + p - ox * sw;
              for (std::int64_t f = 0; f < out[0]; ++f) {
                drive[(f * out[1] + oy) * out[2] + ox] +=
                    w[((f * in[0] + c) * kh + ky) * kw + kx];
              }
              events += static_cast<std::uint64_t>(out[0]);
            }
          }
        }
        break;
      }
      case LayerKind::kLocallyConnected: {
        const auto w = net.weights_of(l);
        const auto n_in = num_elements(in);
        const std::int64_t hw = in[1] * in[2];
        for (Index i : pre) {
          const std::int64_t y = (i % hw) / in[2];
          const std::int64_t x = i % in[2];
          const auto ry = covering(y, layer.kernel[0], layer.stride[0], 0, out[1]);
          const auto rx = covering(x, layer.kernel[1], layer.stride[1], 0, out[2]);
          for (std::int64_t oy = ry.lo; oy <= ry.hi; ++oy) {
            for (std::int64_t ox = rx.lo; ox <= rx.hi; ++ox) {
              for (std::int64_t f = 0; f < out[0]; ++f) {
                const std::int64_t j = (f * out[1] + oy) * out[2] + ox;
                drive[j] += w[j * n_in + i];
              }
              events += static_cast<std::uint64_t>(out[0]);
            }
          }
        }
        break;
      }
      case LayerKind::kMaxPool2D:
      case LayerKind::kFlatten:
        break;
    }
  }

  // Logical OR over each pool window; one event per (spike, window).
  void pool_spikes(std::size_t l, const std::vector<Index>& pre,
                   std::vector<std::uint8_t>& flags, std::vector<Index>& out_active,
                   std::uint64_t& events) const {
    const auto& layer = net.layers[l];
    const auto& in = layer.input_shape;
    const auto& out = layer.output_shape;
    const std::int64_t hw = in[1] * in[2];
    for (Index i : pre) {
      const std::int64_t c = i / hw;
      const std::int64_t y = (i % hw) / in[2];
      const std::int64_t x = i % in[2];
      const auto ry = covering(y, layer.kernel[0], layer.stride[0], 0, out[1]);
      const auto rx = covering(x, layer.kernel[1], layer.stride[1], 0, out[2]);
      for (std::int64_t oy = ry.lo; oy <= ry.hi; ++oy) {
        for (std::int64_t ox = rx.lo; ox <= rx.hi; ++ox) {
          flags[(c * out[1] + oy) * out[2] + ox] = 1;
          ++events;
        }
      }
    }
    out_active.clear();
    for (std::size_t j = 0; j < flags.size(); ++j) {
      if (flags[j]) {
        out_active.push_back(static_cast<Index>(j));
        flags[j] = 0;
      }
    }
  }

  InferenceResult run(const EncodedInput& input, const InferenceOptions& options) const;
};

InferenceResult Engine::Impl::run(const EncodedInput& input,
                                  const InferenceOptions& options) const {
  const Coding coding = options.coding.value_or(net.coding);
  const int t_max = options.max_timesteps.value_or(net.max_timesteps);
  if (t_max < 1) throw Error(Errc::kSchemaError, "max_timesteps must be >= 1");
  if (input.shape != net.input_shape() ||
      static_cast<std::int64_t>(input.values.size()) != num_elements(net.input_shape())) {
    throw Error(Errc::kShapeMismatch, "encoded input " + to_string(input.shape) +
                                          " does not match network input " +
                                          to_string(net.input_shape()));
  }

  const std::size_t L = net.layers.size();
  const bool analog = input.is_analog();
  const auto roles = layer_roles(net, analog);
  const std::size_t first = first_spiking_layer(net);
  const std::size_t start = analog ? first : 0;

  InferenceResult result;
  SpikeTrace& trace = result.trace;
  trace.input_analog = analog;
  trace.counts.assign(L, {});
  trace.feedforward_events.assign(L, 0);
  trace.recurrent_events.assign(L, 0);

  // Static analog prefix, evaluated once.
  std::vector<double> static_drive;
  if (analog) {
    std::vector<double> act(input.values.begin(), input.values.end());
    for (std::size_t l = 0; l < first; ++l) {
      act = analog_sums(l, act, trace.feedforward_events[l]);
      if (const auto* m = net.model_of(l)) {
        for (auto& a : act) a = relu(a + m->bias);
      }
      for (std::size_t j = 0; j < act.size(); ++j) {
        if (!std::isfinite(act[j])) non_finite(l, j, 1);
      }
    }
    if (first == L) {
      // Pure ANN: one pass, decoded by argmax of the output activations.
      trace.t_used = 1;
      for (auto& c : trace.counts) c.assign(1, 0);
      if (options.record_raster) {
        trace.raster.emplace();
        for (std::size_t l = 0; l < L; ++l) {
          Raster r(static_cast<std::size_t>(counts[l].n_n));
          r.push_step(std::vector<std::uint8_t>(r.neurons(), 0));
          trace.raster->push_back(std::move(r));
        }
      }
      VoltageHistory history(act.size());
      history.push_step(act);
      result.decision = decode_max_membrane(history);
      result.exact = emac_exact(net, trace, options.energy);
      result.analytic =
          emac_analytic(net, rates_from_trace(trace, net), 1, options.energy);
      return result;
    }
    static_drive = analog_sums(first, act, trace.feedforward_events[first]);
    for (std::size_t j = 0; j < static_drive.size(); ++j) {
      if (!std::isfinite(static_drive[j])) non_finite(first, j, 1);
    }
  }

  std::vector<std::vector<NeuronState>> states(L);
  std::vector<std::vector<double>> drive(L);
  std::vector<std::vector<Index>> active(L), prev_active(L);
  std::vector<std::vector<std::uint8_t>> pool_flags(L);
  for (std::size_t l = start; l < L; ++l) {
    const auto n = static_cast<std::size_t>(counts[l].n_n);
    if (net.layers[l].has_neurons()) {
      states[l].assign(n, NeuronState{});
      drive[l].assign(n, 0.0);
    } else if (net.layers[l].kind == LayerKind::kMaxPool2D) {
      pool_flags[l].assign(n, 0);
    }
  }
  if (options.record_raster) {
    trace.raster.emplace();
    for (std::size_t l = 0; l < L; ++l) {
      trace.raster->emplace_back(static_cast<std::size_t>(counts[l].n_n));
    }
  }

  const std::size_t out_l = L - 1;
  const auto n_out = static_cast<std::size_t>(counts[out_l].n_n);
  Raster out_raster(n_out);
  VoltageHistory out_history(n_out);
  std::vector<std::uint8_t> out_step(n_out);
  std::vector<double> out_volts(n_out);
  std::vector<Index> input_active;
  std::vector<std::uint8_t> raster_row;

  std::int64_t t = 1;
  for (;; ++t) {
    if (!analog) {
      input_active.clear();
      for (std::size_t px = 0; px < input.values.size(); ++px) {
        if (input.spikes(px, t)) input_active.push_back(static_cast<Index>(px));
      }
      trace.input_spikes += input_active.size();
    }
    for (std::size_t l = start; l < L; ++l) {
      const auto& layer = net.layers[l];
      const auto& pre = l == 0 ? input_active : active[l - 1];
      auto& mine = active[l];
      if (layer.kind == LayerKind::kFlatten) {
        mine = pre;
      } else if (layer.kind == LayerKind::kMaxPool2D) {
        pool_spikes(l, pre, pool_flags[l], mine, trace.feedforward_events[l]);
      } else {
        const auto& model = *net.model_of(l);
        auto& d = drive[l];
        if (roles[l] == LayerRole::kAnalogFed) {
          d = static_drive;
        } else {
          std::fill(d.begin(), d.end(), 0.0);
          scatter(l, pre, d, trace.feedforward_events[l]);
        }
        const bool recurrent = layer.kind == LayerKind::kRecurrentDense;
        if (recurrent) {
          const auto& wt = rec_transposed[l];
          const std::size_t n = d.size();
          for (Index i : prev_active[l]) {
            const float* row = wt.data() + static_cast<std::size_t>(i) * n;
            for (std::size_t j = 0; j < n; ++j) d[j] += row[j];
          }
        }
        mine.clear();
        auto& st = states[l];
        const bool is_out = l == out_l;
        for (std::size_t j = 0; j < st.size(); ++j) {
          const StepResult r = neuron_step(st[j], d[j], model);
          if (!std::isfinite(r.state.i) || !std::isfinite(r.state.v)) {
            non_finite(l, j, t);
          }
          st[j] = r.state;
          if (r.spike) mine.push_back(static_cast<Index>(j));
          if (is_out) {
            out_step[j] = r.spike ? 1 : 0;
            out_volts[j] = r.v_pre_reset;
          }
        }
        if (recurrent) {
          trace.recurrent_events[l] +=
              mine.size() * static_cast<std::uint64_t>(counts[l].n_sr);
        }
        if (is_out) {
          out_raster.push_step(out_step);
          out_history.push_step(out_volts);
        }
      }
      trace.counts[l].push_back(static_cast<std::uint32_t>(mine.size()));
      if (trace.raster) {
        raster_row.assign(static_cast<std::size_t>(counts[l].n_n), 0);
        for (Index j : mine) raster_row[j] = 1;
        (*trace.raster)[l].push_step(raster_row);
      }
    }
    for (std::size_t l = start; l < L; ++l) {
      if (net.layers[l].kind == LayerKind::kRecurrentDense) {
        prev_active[l] = active[l];
      }
    }
    if (coding == Coding::kRoc && !active[out_l].empty()) break;
    if (t == t_max) break;
  }
  trace.t_used = t;
  for (std::size_t l = 0; l < start; ++l) {
    trace.counts[l].assign(static_cast<std::size_t>(t), 0);
    if (trace.raster) {
      std::vector<std::uint8_t> zeros(static_cast<std::size_t>(counts[l].n_n), 0);
      for (std::int64_t s = 0; s < t; ++s) (*trace.raster)[l].push_step(zeros);
    }
  }

  result.decision = coding == Coding::kRoc ? decode_roc(out_raster, out_history)
                                           : decode_max_membrane(out_history);
  result.exact = emac_exact(net, trace, options.energy);
  result.analytic = emac_analytic(net, rates_from_trace(trace, net), trace.t_used,
                                  options.energy);
  return result;
}

Engine::Engine(const NetworkSpec& net) : impl_(std::make_unique<Impl>(net)) {}
Engine::~Engine() = default;
Engine::Engine(Engine&&) noexcept = default;
Engine& Engine::operator=(Engine&&) noexcept = default;

InferenceResult Engine::run(const EncodedInput& input,
                            const InferenceOptions& options) const {
  return impl_->run(input, options);
}

const NetworkSpec& Engine::network() const { return impl_->net; }

InferenceResult run_inference(const NetworkSpec& net, const EncodedInput& input,
                              const InferenceOptions& options) {
  return Engine(net).run(input, options);
}

Stat summarize(const std::vector<double>& values) {
  if (values.empty()) return {};
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - mean) * (v - mean);
  return {mean, std::sqrt(sq / static_cast<double>(values.size()))};
}

std::int64_t spiking_neuron_count(const NetworkSpec& net) {
  std::int64_t n = 0;
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const auto* m = net.model_of(l);
    if (m && m->is_spiking()) n += num_elements(net.layers[l].output_shape);
  }
  return n;
}

namespace {

MethodStats method_stats(const std::vector<const EnergyReport*>& reports,
                         const std::vector<const SpikeTrace*>& traces,
                         std::size_t layers) {
  MethodStats s;
  auto column = [&](auto&& get) {
    std::vector<double> v;
    v.reserve(reports.size());
    for (const auto* r : reports) v.push_back(get(*r));
    return summarize(v);
  };
  s.syn = column([](const EnergyReport& r) { return r.syn; });
  s.upd = column([](const EnergyReport& r) { return r.upd; });
  s.rec = column([](const EnergyReport& r) { return r.rec; });
  s.pool = column([](const EnergyReport& r) { return r.pool; });
  s.tot = column([](const EnergyReport& r) { return r.tot; });
  s.layers.resize(layers);
  for (std::size_t l = 0; l < layers; ++l) {
    s.layers[l].syn = column([l](const EnergyReport& r) { return r.layers[l].syn; });
    s.layers[l].upd = column([l](const EnergyReport& r) { return r.layers[l].upd; });
    s.layers[l].rec = column([l](const EnergyReport& r) { return r.layers[l].rec; });
    s.layers[l].tot =
        column([l](const EnergyReport& r) { return r.layers[l].total(); });
    std::vector<double> spikes;
    for (const auto* t : traces) spikes.push_back(static_cast<double>(t->layer_spikes(l)));
    s.layers[l].spikes = summarize(spikes);
  }
  return s;
}

}  // namespace

AggregateStats run_dataset(const NetworkSpec& net,
                           const std::vector<EncodedInput>& samples,
                           const InferenceOptions& options, unsigned jobs) {
  if (samples.empty()) throw Error(Errc::kEmptyDataset, "no samples to run");
  const Engine engine(net);
  std::vector<std::optional<InferenceResult>> slots(samples.size());
  std::vector<std::string> errors(samples.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < samples.size(); k = next++) {
      try {
        slots[k] = engine.run(samples[k], options);
      } catch (const Error& e) {
        if (e.code() != Errc::kNonFiniteState) throw;
        errors[k] = e.what();
      }
    }
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(samples.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (unsigned j = 0; j < jobs; ++j) {
      pool.emplace_back([&] {
        try {
          worker();
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = samples.size();
        }
      });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
  }

  AggregateStats stats;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    if (slots[k]) {
      stats.sample_index.push_back(k);
      stats.results.push_back(std::move(*slots[k]));
    } else {
      stats.failures.push_back({k, errors[k]});
    }
  }
  if (stats.results.empty()) return stats;

  std::vector<const EnergyReport*> analytic, exact;
  std::vector<const SpikeTrace*> traces;
  for (const auto& r : stats.results) {
    analytic.push_back(&r.analytic);
    exact.push_back(&r.exact);
    traces.push_back(&r.trace);
  }
  stats.analytic = method_stats(analytic, traces, net.layers.size());
  stats.exact = method_stats(exact, traces, net.layers.size());

  const auto neurons = static_cast<double>(spiking_neuron_count(net));
  std::vector<double> spikes, t_used, events, updates;
  for (const auto& r : stats.results) {
    double total = 0.0;
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
      if (net.layers[l].has_neurons()) total += static_cast<double>(r.trace.layer_spikes(l));
    }
    spikes.push_back(total);
    t_used.push_back(static_cast<double>(r.trace.t_used));
    events.push_back(static_cast<double>(r.trace.synaptic_events()));
    updates.push_back(static_cast<double>(r.trace.t_used) * neurons);
  }
  stats.total_spikes = summarize(spikes);
  stats.t_used = summarize(t_used);
  stats.synaptic_events = summarize(events);
  stats.neuron_updates = summarize(updates);
  return stats;
}

}  // namespace emacprof
