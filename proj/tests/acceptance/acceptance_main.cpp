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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Reference values come from the oracles in tests/support.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli_runner.hpp"
#include "emacprof/architectures.hpp"
#include "emacprof/calib.hpp"
#include "emacprof/codec.hpp"
#include "emacprof/emac.hpp"
#include "emacprof/engine.hpp"
#include "emacprof/errors.hpp"
#include "emacprof/netspec.hpp"
#include "emacprof/neuron.hpp"
#include "emacprof/report.hpp"
#include "generators.hpp"
#include "oracles.hpp"

namespace emacprof {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects the first few failure messages of a criterion.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (ok) return;
    ++failures_;
    if (failures_ <= 3) messages_ += (messages_.empty() ? "" : "; ") + what;
  }
  int failures() const { return failures_; }
  Outcome outcome(const std::string& summary) const {
    if (failures_ == 0) return {true, summary};
    return {false, std::to_string(failures_) + " failure(s): " + messages_};
  }

 private:
  int failures_ = 0;
  std::string messages_;
};

std::string num(double v) { return format_number(v); }

bool rel_close(double a, double b, double rel) {
  return std::fabs(a - b) <= rel * std::max({std::fabs(a), std::fabs(b), 1.0});
}

EncodedInput constant_spikes(const Shape& shape) {
  return encode(Tensor{shape, std::vector<float>(static_cast<std::size_t>(num_elements(shape)), 1.0f)},
                shape, EncodingMode::kPoissonSpikes, 0);
}

// 1. Per-event costs derived from the operation classification.
Outcome energy_parameters() {
  Check c;
  // Oracle: AC = 2/3, MAC = 1. LIF update is 2 MAC + 2 AC, IFL is 2 AC,
  // every synaptic event is one AC.
  const double ac = 2.0 / 3.0, mac = 1.0;
  const struct {
    NeuronKind kind;
    double upd;
    const char* upd_text;
  } rows[] = {{NeuronKind::kLif, 2 * mac + 2 * ac, "3.333"},
              {NeuronKind::kIfl, 2 * ac, "1.333"}};
  for (const auto& r : rows) {
    const auto p = energy_params(r.kind);
    const std::string name(to_string(r.kind));
    c.expect(std::fabs(p.e_syn - ac) <= 1e-12, name + " e_syn");
    c.expect(std::fabs(p.e_upd - r.upd) <= 1e-12, name + " e_upd");
    const auto ops = classify_update_ops(r.kind);
    c.expect(std::fabs(emac_of(ops.synaptic) - p.e_syn) <= 1e-12, name + " synaptic ops");
    c.expect(std::fabs(emac_of(ops.update) - p.e_upd) <= 1e-12, name + " update ops");
    c.expect(format_rounded(p.e_syn) == "0.667", name + " rounded e_syn");
    c.expect(format_rounded(p.e_upd) == r.upd_text, name + " rounded e_upd");
  }
  const auto ann = energy_params(NeuronKind::kAnnRelu);
  c.expect(ann.e_syn == 1.0 && ann.e_upd == 0.0, "ANN costs");
  const auto lif = energy_params(NeuronKind::kLif);
  const auto ifl = energy_params(NeuronKind::kIfl);
  return c.outcome("LIF=(" + format_rounded(lif.e_syn) + "," + format_rounded(lif.e_upd) +
                   ") IFL=(" + format_rounded(ifl.e_syn) + "," + format_rounded(ifl.e_upd) + ")");
}

// 2. ANN special case against brute-force connection enumeration.
Outcome ann_special_case() {
  Check c;
  std::mt19937_64 rng(20260201);
  std::int64_t total = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const auto net = testing::random_conv_chain(rng, testing::ann_model());
    LayerRates ones{std::nullopt, std::vector<double>(net.layers.size(), 1.0)};
    const auto rep = emac_analytic(net, ones, 1);
    const auto macs = ann_mac_count(net);
    const auto brute = testing::brute_force_mac_count(net);
    const std::string tag = "trial " + std::to_string(trial);
    c.expect(rep.tot == static_cast<double>(macs), tag + ": analytic " + num(rep.tot) +
                                                       " vs MAC " + std::to_string(macs));
    c.expect(macs == brute, tag + ": MAC " + std::to_string(macs) + " vs brute " +
                                std::to_string(brute));
    total += brute;
  }
  return c.outcome("10 chains, " + std::to_string(total) + " connections enumerated");
}

// 3. Exact event counts equal the analytic formula on dense nets.
Outcome dense_identity() {
  Check c;
  std::mt19937_64 rng(20260202);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto net = testing::random_dense_net(rng);
    const auto x = testing::random_poisson_input(rng, net.input_shape());
    const auto r = run_inference(net, x);
    const auto analytic = emac_analytic(net, rates_from_trace(r.trace, net), r.trace.t_used);
    const double rel = std::fabs(r.exact.tot - analytic.tot) / std::max(1.0, analytic.tot);
    worst = std::max(worst, rel);
    c.expect(rel <= 1e-9, "trial " + std::to_string(trial) + ": exact " + num(r.exact.tot) +
                              " vs analytic " + num(analytic.tot));
    c.expect(r.trace.synaptic_events() > 0 || r.exact.syn == 0, "event bookkeeping");
  }
  return c.outcome("20 nets, worst relative gap " + num(worst));
}

// 4. Convolution bound under uniform presynaptic activity.
Outcome conv_bound() {
  Check c;
  std::mt19937_64 rng(20260203);
  int equal = 0, strict = 0, overhang = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::int64_t ch = 1 + rng() % 3, h = 5 + rng() % 10, w = 5 + rng() % 10;
    const int k = 1 + static_cast<int>(rng() % 5);
    const int s = 1 + static_cast<int>(rng() % 3);
    Padding pad;
    if (rng() % 3 == 0) pad = {Padding::Mode::kZero, 1 + static_cast<int>(rng() % k)};
    if (window_output_extent(h, k, s, pad.amount()) < 1 ||
        window_output_extent(w, k, s, pad.amount()) < 1) {
      --trial;
      continue;
    }
    NetworkBuilder b({ch, h, w}, Coding::kRate, 6);
    b.model("m", testing::ifl_model(0.5))
        .conv2d(1 + static_cast<std::int64_t>(rng() % 4), k, s, pad, "m")
        .conv2d(2, 1, 1, {}, "m");
    const auto net = b.build({rng(), 1.0, 1.0});
    const auto& layer = net.layers[0];
    const auto fanout = testing::enumerate_fanout(layer);
    std::int64_t realized = 0;
    bool uncovered = false;
    for (auto f : fanout) {
      realized += f;
      uncovered = uncovered || f == 0;
    }
    const auto counts = layer_counts(layer);
    const bool full = realized == counts.n_s * counts.n_n;
    overhang += pad.mode == Padding::Mode::kValid && uncovered;

    const auto r = run_inference(net, constant_spikes(net.input_shape()));
    const double exact = r.exact.layers[0].syn;
    const double analytic = r.analytic.layers[0].syn;
    const std::string tag = "trial " + std::to_string(trial);
    c.expect(exact <= analytic * (1 + 1e-12), tag + ": exact " + num(exact) + " > analytic " +
                                                   num(analytic));
    if (full) {
      c.expect(rel_close(exact, analytic, 1e-12), tag + ": full fanout but " + num(exact) +
                                                      " != " + num(analytic));
      ++equal;
    } else {
      c.expect(exact < analytic, tag + ": partial fanout but no gap");
      ++strict;
    }
  }
  c.expect(overhang > 0 && strict > 0, "generator missed a case");
  return c.outcome("200 nets: " + std::to_string(equal) + " equal (" + std::to_string(overhang) +
                   " with valid-padding overhang), " + std::to_string(strict) + " strict");
}

// 5. Neuron fixtures against independent recurrences.
Outcome neuron_dynamics() {
  Check c;
  {
    const auto m = testing::lif_model(0.01, 0.1, 1e9);
    NeuronState s{1.0, 0.0, false};
    for (int k = 1; k <= 1000; ++k) {
      s = lif_step(s, 0.0, m).state;
      const double closed = std::pow(1.0 - m.dt / m.tau_syn, k);
      const double ulp = std::nextafter(closed, 2.0) - closed;
      c.expect(std::fabs(s.i - closed) <= 8.0 * k * ulp, "decay at k=" + std::to_string(k));
    }
  }
  int lif_first = 0;
  {
    const auto m = testing::lif_model(1e-30, 0.5, 0.9);
    const auto oracle = testing::iterate_lif(1.0, 0.0, std::vector<double>(10, 0.0), 1e-30, 0.5, 0.9);
    NeuronState s{1.0, 0.0, false};
    for (int k = 1; k <= 10; ++k) {
      const auto r = lif_step(s, 0.0, m);
      c.expect(r.spike == oracle[k - 1].spike && r.state.v == oracle[k - 1].v,
               "LIF oracle mismatch at step " + std::to_string(k));
      if (r.spike && lif_first == 0) lif_first = k;
      s = r.state;
    }
    c.expect(lif_first == 4, "LIF first spike at " + std::to_string(lif_first));
  }
  int ifl_first = 0;
  {
    const auto m = testing::ifl_model(1.0);
    const auto oracle = testing::iterate_ifl(0.0, 0.0, std::vector<double>(6, 0.3), 1.0);
    NeuronState s;
    for (int k = 1; k <= 6; ++k) {
      const auto r = ifl_step(s, 0.3, m);
      c.expect(r.spike == oracle[k - 1].spike && r.state.v == oracle[k - 1].v,
               "IFL oracle mismatch at step " + std::to_string(k));
      if (r.spike && ifl_first == 0) ifl_first = k;
      s = r.state;
    }
    c.expect(ifl_first == 3, "IFL first spike at " + std::to_string(ifl_first));
  }
  return c.outcome("decay 1000 steps, LIF first spike t=" + std::to_string(lif_first) +
                   ", IFL first spike t=" + std::to_string(ifl_first));
}

// 6. Rank-order coding semantics.
Outcome roc_semantics() {
  Check c;
  std::mt19937_64 rng(20260206);
  InferenceOptions rec;
  rec.record_raster = true;
  int early = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto net = testing::random_conv_chain(rng, testing::ifl_model(0.5), Coding::kRoc, 24);
    const auto x = testing::random_poisson_input(rng, net.input_shape());
    const auto r = run_inference(net, x, rec);
    const auto t_used = r.trace.t_used;
    const std::string tag = "roc trial " + std::to_string(trial);
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
      c.expect(static_cast<std::int64_t>(r.trace.counts[l].size()) == t_used &&
                   static_cast<std::int64_t>((*r.trace.raster)[l].steps()) == t_used,
               tag + ": counters past T_used");
    }
    c.expect(testing::events_from_raster(net, x, r.trace) == r.trace.feedforward_events,
             tag + ": events beyond the recorded raster");
    if (!r.decision.fallback_used) {
      c.expect(r.decision.latency_t == t_used, tag + ": stop not at first output spike");
      early += t_used < 24;
    } else {
      c.expect(t_used == 24, tag + ": fallback before T_max");
    }
  }
  c.expect(early > 0, "no trial stopped early");

  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng() % 10, steps = 1 + rng() % 20;
    Raster r(n);
    for (std::size_t t = 0; t < steps; ++t) r.push_step(std::vector<std::uint8_t>(n, 0));
    const std::size_t first = rng() % steps;
    r.set(rng() % n, first, true);
    VoltageHistory h(n);
    for (std::size_t t = 0; t < steps; ++t) {
      std::vector<double> v(n);
      for (auto& x : v) x = std::uniform_real_distribution<double>(-1, 1)(rng);
      h.push_step(v);
    }
    const auto before = decode_roc(r, h);
    for (std::size_t t = first + 1; t < steps; ++t) {
      for (std::size_t j = 0; j < n; ++j) r.set(j, t, rng() % 2);
    }
    c.expect(decode_roc(r, h) == before, "decode changed after mutation in trial " +
                                             std::to_string(trial));
  }

  std::uint64_t spikes = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Coding coding = trial % 2 ? Coding::kRoc : Coding::kRate;
    const auto net = testing::random_conv_chain(rng, testing::ifl_model(0.3, true), coding, 16);
    const auto x = testing::random_poisson_input(rng, net.input_shape());
    const auto r = run_inference(net, x, rec);
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
      if (!net.layers[l].has_neurons()) continue;
      const auto& ras = (*r.trace.raster)[l];
      for (std::size_t n = 0; n < ras.neurons(); ++n) {
        int s = 0;
        for (std::size_t t = 0; t < ras.steps(); ++t) s += ras.at(n, t);
        c.expect(s <= 1, "spike_once violated in trial " + std::to_string(trial));
      }
      spikes += r.trace.layer_spikes(l);
    }
  }
  return c.outcome("3x1000 trials, " + std::to_string(early) + " early stops, " +
                   std::to_string(spikes) + " spike_once spikes checked");
}

// 7. Energy model calibration.
Outcome calibration() {
  Check c;
  // (a)
  const std::vector<Observation> two = {{"a", 10, 4, 32, {}}, {"b", 5, 8, 34, {}}};
  const auto m2 = fit_energy_model(two);
  c.expect(m2.e_syn_J == 2.0 && m2.e_upd_J == 3.0, "(a) got " + num(m2.e_syn_J) + "," +
                                                     num(m2.e_upd_J));

  std::mt19937_64 rng(20260207);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto planted = [&] { return std::pair{1e-9 * (0.5 + unit(rng)), 1e-10 * (0.5 + unit(rng))}; };
  auto design = [&](std::size_t n, double es, double eu) {
    std::vector<Observation> obs(n);
    for (auto& o : obs) {
      o.S = 1e5 + 1e7 * unit(rng);
      o.U = 1e4 + 1e6 * unit(rng);
      o.E_joules = o.S * es + o.U * eu;
    }
    return obs;
  };

  // (b)
  double worst_b = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto [es, eu] = planted();
    const auto m = fit_energy_model(design(3 + rng() % 10, es, eu));
    worst_b = std::max({worst_b, std::fabs(m.e_syn_J - es) / es, std::fabs(m.e_upd_J - eu) / eu});
  }
  c.expect(worst_b <= 1e-9, "(b) relative error " + num(worst_b));

  // (c) 50 noisy training points, noiseless held-out truth. Even trials add
  // homoscedastic noise and fit unweighted; odd trials add 1% relative noise
  // and fit with inverse-variance weights taken from the measured energies.
  int covered = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto [es, eu] = planted();
    auto obs = design(50, es, eu);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<double> weights;
    if (trial % 2 == 0) {
      for (auto& o : obs) o.E_joules += 1e-4 * noise(rng);
    } else {
      for (auto& o : obs) {
        o.E_joules *= 1.0 + 0.01 * noise(rng);
        weights.push_back(1.0 / (o.E_joules * o.E_joules));
      }
    }
    const auto m = fit_energy_model(obs, weights);
    const double s = 1e5 + 1e7 * unit(rng), u = 1e4 + 1e6 * unit(rng);
    const auto p = predict_energy(m, s, u);
    covered += std::fabs(p.E - (s * es + u * eu)) <= 3.0 * p.sigma;
  }
  c.expect(covered >= 990, "(c) coverage " + std::to_string(covered) + "/1000");

  // (d) power-of-two scaling of energies and of each regressor.
  int scale_checks = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto [es, eu] = planted();
    auto obs = design(2 + rng() % 20, es, eu);
    std::normal_distribution<double> noise(0.0, 1.0);
    for (auto& o : obs) o.E_joules *= 1.0 + 0.01 * noise(rng);
    const auto base = fit_energy_model(obs);
    const double f = std::ldexp(1.0, static_cast<int>(rng() % 41) - 20);
    auto e_scaled = obs, s_scaled = obs, u_scaled = obs;
    for (auto& o : e_scaled) o.E_joules *= f;
    for (auto& o : s_scaled) o.S *= f;
    for (auto& o : u_scaled) o.U *= f;
    const auto me = fit_energy_model(e_scaled);
    const auto ms = fit_energy_model(s_scaled);
    const auto mu = fit_energy_model(u_scaled);
    const std::string tag = "(d) trial " + std::to_string(trial);
    c.expect(me.e_syn_J == base.e_syn_J * f && me.e_upd_J == base.e_upd_J * f, tag + " energy");
    c.expect(ms.e_syn_J == base.e_syn_J / f && ms.e_upd_J == base.e_upd_J, tag + " S column");
    c.expect(mu.e_upd_J == base.e_upd_J / f && mu.e_syn_J == base.e_syn_J, tag + " U column");
    c.expect(me.cov[0] == base.cov[0] * f * f && me.cov[3] == base.cov[3] * f * f,
             tag + " covariance");
    scale_checks += 4;
  }
  return c.outcome("(a) exact, (b) worst rel " + num(worst_b) + ", (c) coverage " +
                   std::to_string(covered) + "/1000, (d) " + std::to_string(scale_checks) +
                   " bit-exact checks");
}

// 8. Equal spike totals, different synaptic work.
Outcome spike_count_inadequacy() {
  Check c;
  const auto model = testing::ifl_model();
  // Zero weights keep every neuron silent, so both nets carry exactly the
  // input spikes and differ only in fanout.
  const WeightInit silent{1, 0.0, 0.0};
  const auto narrow = dense_mlp(32, {10}, model, Coding::kRate, 16, silent);
  const auto wide = dense_mlp(32, {100}, model, Coding::kRate, 16, silent);
  std::mt19937_64 rng(20260208);
  const auto x = testing::random_tensor(rng, {32}, 0.2, 0.8);
  const auto in = encode(x, {32}, EncodingMode::kPoissonSpikes, 7);
  const auto a = run_inference(narrow, in);
  const auto b = run_inference(wide, in);
  auto spikes = [](const SpikeTrace& t) {
    std::uint64_t s = t.input_spikes;
    for (std::size_t l = 0; l < t.num_layers(); ++l) s += t.layer_spikes(l);
    return s;
  };
  c.expect(spikes(a.trace) == spikes(b.trace) && spikes(a.trace) > 0, "spike totals differ");
  const double ratio_exact = b.exact.syn / a.exact.syn;
  const double ratio_analytic = b.analytic.syn / a.analytic.syn;
  c.expect(ratio_exact >= 5.0, "exact E_syn ratio " + num(ratio_exact));
  c.expect(ratio_analytic >= 5.0, "analytic E_syn ratio " + num(ratio_analytic));
  return c.outcome(std::to_string(spikes(a.trace)) + " spikes each, E_syn " +
                   num(a.exact.syn) + " vs " + num(b.exact.syn) + " (x" + num(ratio_exact) + ")");
}

// 9. Determinism, formats and exit codes.
Outcome determinism_and_formats() {
  Check c;
  std::mt19937_64 rng(20260209);

  int reports = 0;
  for (int trial = 0; trial < 5; ++trial) {
    const auto net = testing::random_conv_chain(rng, testing::lif_model(0.2, 0.5, 0.3));
    std::vector<EncodedInput> samples;
    for (std::uint64_t k = 0; k < 4; ++k) {
      samples.push_back(encode(testing::random_tensor(rng, net.input_shape()), net.input_shape(),
                               EncodingMode::kPoissonSpikes, 99 + k));
    }
    const ProfileInfo info{"net", 99, false, "poisson"};
    const auto s1 = run_dataset(net, samples, {}, 1);
    const auto s2 = run_dataset(net, samples, {}, 3);
    c.expect(profile_json(net, s1, info) == profile_json(net, s2, info), "profile json differs");
    c.expect(energy_csv(net, s1) == energy_csv(net, s2), "energy csv differs");
    c.expect(spikes_csv(net, s1) == spikes_csv(net, s2), "spikes csv differs");
    reports += 3;
  }

  int round_trips = 0;
  for (int trial = 0; trial < 20; ++trial) {
    auto net = trial % 2 ? testing::random_dense_net(rng, true)
                         : testing::random_conv_chain(rng, testing::ifl_model());
    auto w = std::vector<float>(net.weights.get(net.layers[0].weights_ref).begin(),
                                net.weights.get(net.layers[0].weights_ref).end());
    const float specials[] = {-0.0f, std::numeric_limits<float>::denorm_min(),
                              std::numeric_limits<float>::max(), 1e-30f};
    for (std::size_t k = 0; k < std::min<std::size_t>(w.size(), 4); ++k) w[k] = specials[k];
    net.weights.set(net.layers[0].weights_ref, w);
    const auto manifest = serialize_manifest(net);
    const auto bytes = net.weights.serialize();
    const auto back = parse_network(manifest, bytes);
    c.expect(serialize_manifest(back) == manifest, "manifest round trip");
    const auto bytes2 = back.weights.serialize();
    c.expect(bytes2.size() == bytes.size() &&
                 std::memcmp(bytes2.data(), bytes.data(), bytes.size()) == 0,
             "weights round trip");
    c.expect(back == net, "network round trip");
    round_trips += 2;
  }

  const auto dir = testing::scratch_dir("acceptance_cli");
  {
    NetworkBuilder b({6}, Coding::kRate, 8);
    b.model("m", testing::ifl_model(0.4)).dense(5, "m").dense(3, "m");
    save_network(b.build({3, 1.0, 1.0}), (dir / "ok.json").string(), (dir / "ok.emwt").string());
    auto bad = testing::ifl_model();
    bad.bias = 1e308;
    NetworkBuilder nb({2}, Coding::kRate, 4);
    nb.model("m", bad).dense(2, "m");
    save_network(nb.build({1}), (dir / "nan.json").string(), (dir / "nan.emwt").string());
    fs::create_directories(dir / "in6");
    fs::create_directories(dir / "in2");
    for (int k = 0; k < 3; ++k) {
      write_tensor_bin(testing::random_tensor(rng, {6}),
                       (dir / "in6" / ("s" + std::to_string(k) + ".bin")).string());
    }
    write_tensor_bin(testing::random_tensor(rng, {2}), (dir / "in2" / "s.bin").string());
    std::ofstream(dir / "bad.json") << R"({"version": 1, "layers": []})";
    std::ofstream(dir / "collinear.csv") << "name,S,U,E_joules\na,1,2,3\nb,2,4,6\n";
  }
  const std::string d = dir.string();
  const std::string profile = "profile --network " + d + "/ok.json --inputs " + d +
                              "/in6 --encoding poisson --seed 5 --format both --out ";
  const struct {
    std::string args;
    int code;
  } cases[] = {
      {"inspect --network " + d + "/ok.json", 0},
      {profile + d + "/run1", 0},
      {profile + d + "/run2", 0},
      {"inspect --network " + d + "/bad.json", 2},
      {"frobnicate", 2},
      {"profile --network " + d + "/nan.json --inputs " + d + "/in2 --out " + d + "/nan", 3},
      {"calibrate --observations " + d + "/collinear.csv", 4},
  };
  for (const auto& k : cases) {
    const auto r = testing::run_cli(k.args);
    c.expect(r.exit_code == k.code, "`" + k.args.substr(0, k.args.find(' ')) + "` exited " +
                                        std::to_string(r.exit_code) + ", expected " +
                                        std::to_string(k.code));
  }
  for (const char* f : {"energy.json", "energy.csv", "spikes.csv", "latency.csv"}) {
    const auto a = testing::slurp(dir / "run1" / f);
    c.expect(!a.empty() && a == testing::slurp(dir / "run2" / f), std::string(f) + " differs");
  }
  return c.outcome(std::to_string(reports) + " reports stable, " + std::to_string(round_trips) +
                   " round trips bit-exact, exit codes 0/2/3/4 verified");
}

// 10. Planted-model rehearsal on the three reference CNNs.
Outcome cnn_rehearsal() {
  Check c;
  const double e_syn = 2.0e-9, e_upd = 5.0e-10;
  std::mt19937_64 rng(20260210);
  std::normal_distribution<double> noise(0.0, 1.0);
  struct Run {
    std::string name;
    std::vector<Observation> obs;
    double mean_E = 0.0, mean_S = 0.0, mean_U = 0.0, mean_t = 0.0;
  };
  std::vector<Run> runs;
  for (const char* name : {"cnn-16-16", "cnn-16-32", "cnn-32-32-64"}) {
    const auto net = reference_cnn(name, {rng(), 0.0, 1.0}).value();
    const double neurons = weighted_update_neurons(net);
    const Engine engine(net);
    Run run{name, {}};
    for (int k = 0; k < 50; ++k) {
      const auto x = testing::random_tensor(rng, net.input_shape(), 0.0, 0.05);
      const auto r = engine.run(encode(x, net.input_shape(), EncodingMode::kAnalogCurrent));
      Observation o;
      o.name = std::string(name) + "/" + std::to_string(k);
      o.S = static_cast<double>(r.trace.synaptic_events());
      o.U = static_cast<double>(r.trace.t_used) * neurons;
      o.E_joules = (o.S * e_syn + o.U * e_upd) * (1.0 + 0.01 * noise(rng));
      run.mean_S += o.S / 50;
      run.mean_U += o.U / 50;
      run.mean_E += o.E_joules / 50;
      run.mean_t += static_cast<double>(r.trace.t_used) / 50;
      run.obs.push_back(o);
    }
    runs.push_back(std::move(run));
  }
  std::vector<Observation> train = runs[0].obs;
  train.insert(train.end(), runs[1].obs.begin(), runs[1].obs.end());
  std::vector<double> weights;
  for (const auto& o : train) weights.push_back(1.0 / (o.E_joules * o.E_joules));
  const auto model = fit_energy_model(train, weights);
  const auto& target = runs[2];
  const auto p = predict_energy(model, target.mean_S, target.mean_U);
  const double measurement_sigma = 0.01 * target.mean_E / std::sqrt(50.0);
  const double sigma = std::hypot(p.sigma, measurement_sigma);
  const double rel = (p.E - target.mean_E) / target.mean_E;
  c.expect(std::fabs(p.E - target.mean_E) <= 3.0 * sigma,
           "prediction " + num(p.E) + " vs measured " + num(target.mean_E) + " sigma " + num(sigma));
  std::ostringstream detail;
  detail << std::setprecision(3) << "T_used " << runs[0].mean_t << "/" << runs[1].mean_t << "/"
         << target.mean_t << ", fit e_syn=" << model.e_syn_J << " e_upd=" << model.e_upd_J
         << ", predicted " << p.E << " J vs " << target.mean_E << " J (" << rel * 100
         << "%, " << std::fabs(p.E - target.mean_E) / sigma << " sigma)";
  return c.outcome(detail.str());
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace
}  // namespace emacprof

int main() {
  using namespace emacprof;
  const std::vector<Criterion> criteria = {
      {1, "energy parameters", 1, energy_parameters},
      {2, "ANN special case", 10, ann_special_case},
      {3, "analytic/exact identity", 30, dense_identity},
      {4, "conv bound", 30, conv_bound},
      {5, "neuron dynamics", 1, neuron_dynamics},
      {6, "ROC semantics", 30, roc_semantics},
      {7, "calibration", 60, calibration},
      {8, "spike-count inadequacy", 5, spike_count_inadequacy},
      {9, "determinism and formats", 10, determinism_and_formats},
      {10, "CNN rehearsal", 300, cnn_rehearsal},
  };
  int failed = 0;
  for (const auto& crit : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = crit.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > crit.budget_s) {
      out.pass = false;
      out.detail += " [over budget " + format_number(crit.budget_s) + " s]";
    }
    failed += !out.pass;
    std::ostringstream t;
    t << std::fixed << std::setprecision(2) << secs;
    std::cout << (out.pass ? "PASS" : "FAIL") << " criterion " << crit.id << " " << crit.name
              << " (" << t.str() << " s): " << out.detail << std::endl;
  }
  std::cout << (failed ? "FAILED " : "ALL PASSED ") << criteria.size() - failed << "/"
            << criteria.size() << std::endl;
  return failed ? 1 : 0;
}
