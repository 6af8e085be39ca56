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

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "emacprof/architectures.hpp"
#include "emacprof/calib.hpp"
#include "emacprof/codec.hpp"
#include "emacprof/emac.hpp"
#include "emacprof/engine.hpp"
#include "emacprof/neuron.hpp"

namespace emacprof {
namespace {

Tensor uniform_tensor(const Shape& shape, double hi, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> dist(0.0f, static_cast<float>(hi));
  Tensor t{shape, std::vector<float>(static_cast<std::size_t>(num_elements(shape)))};
  for (auto& v : t.values) v = dist(rng);
  return t;
}

NeuronModelSpec lif() {
  NeuronModelSpec m;
  m.kind = NeuronKind::kLif;
  m.tau_syn = 5e-3;
  m.tau_mem = 2e-3;
  m.v_th = 0.5;
  return m;
}

void BM_LifStep(benchmark::State& state) {
  const auto m = lif();
  NeuronState s;
  for (auto _ : state) {
    const auto r = lif_step(s, 0.3, m);
    s = r.state;
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_LifStep);

// One inference of a reference CNN on analog input, ROC early stop.
void BM_ReferenceCnn(benchmark::State& state, const char* name) {
  const auto net = reference_cnn(name, {7, 0.0, 1.0}).value();
  const Engine engine(net);
  const auto x = encode(uniform_tensor(net.input_shape(), 0.05, 1), net.input_shape(),
                        EncodingMode::kAnalogCurrent);
  std::int64_t events = 0;
  for (auto _ : state) {
    const auto r = engine.run(x);
    events += static_cast<std::int64_t>(r.trace.synaptic_events());
    benchmark::DoNotOptimize(r.decision);
  }
  state.counters["events/s"] = benchmark::Counter(static_cast<double>(events),
                                                  benchmark::Counter::kIsRate);
}
BENCHMARK_CAPTURE(BM_ReferenceCnn, cnn_16_16, "cnn-16-16")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_ReferenceCnn, cnn_32_32_64, "cnn-32-32-64")->Unit(benchmark::kMillisecond);

// Rate-coded dense MLP driven by Poisson spikes for the full window.
void BM_DenseMlpPoisson(benchmark::State& state) {
  const auto width = state.range(0);
  const auto net = dense_mlp(256, {width, width, 10}, lif(), Coding::kRate, 64, {3, 2.0, 1.0});
  const Engine engine(net);
  const auto x = encode(uniform_tensor({256}, 0.5, 2), {256}, EncodingMode::kPoissonSpikes, 5);
  for (auto _ : state) benchmark::DoNotOptimize(engine.run(x).trace.t_used);
}
BENCHMARK(BM_DenseMlpPoisson)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

// Whole-dataset profiling with one and several workers.
void BM_RunDataset(benchmark::State& state) {
  const auto net = reference_cnn("cnn-16-16", {7, 0.0, 1.0}).value();
  std::vector<EncodedInput> samples;
  for (std::uint64_t k = 0; k < 16; ++k) {
    samples.push_back(encode(uniform_tensor(net.input_shape(), 0.05, k), net.input_shape(),
                             EncodingMode::kAnalogCurrent));
  }
  const auto jobs = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_dataset(net, samples, {}, jobs).t_used);
}
BENCHMARK(BM_RunDataset)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_AnalyticVgg(benchmark::State& state) {
  const auto net = vgg_baseline(lif(), Coding::kRate, 64, {1, 0.0, 1.0});
  LayerRates rates{0.3, std::vector<double>(net.layers.size(), 0.2)};
  for (auto _ : state) benchmark::DoNotOptimize(emac_analytic(net, rates, 64).tot);
}
BENCHMARK(BM_AnalyticVgg);

void BM_FitEnergyModel(benchmark::State& state) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Observation> obs(static_cast<std::size_t>(state.range(0)));
  for (auto& o : obs) {
    o.S = 1e6 * (1 + unit(rng));
    o.U = 1e5 * (1 + unit(rng));
    o.E_joules = 2e-9 * o.S + 5e-10 * o.U + 1e-6 * unit(rng);
  }
  for (auto _ : state) benchmark::DoNotOptimize(fit_energy_model(obs).e_syn_J);
}
BENCHMARK(BM_FitEnergyModel)->Arg(2)->Arg(50)->Arg(1000);

}  // namespace
}  // namespace emacprof

BENCHMARK_MAIN();
