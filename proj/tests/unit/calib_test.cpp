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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "emacprof/architectures.hpp"
#include "emacprof/calib.hpp"
#include "emacprof/errors.hpp"
#include "generators.hpp"

namespace emacprof {
namespace {

Errc fit_error(const std::vector<Observation>& obs) {
  try {
    fit_energy_model(obs);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return Errc::kIoError;
}

const std::vector<Observation> kTwoPoint = {{"a", 10, 4, 32, {}}, {"b", 5, 8, 34, {}}};

TEST(Fit, TwoObservationsSolveExactly) {
  const auto m = fit_energy_model(kTwoPoint);
  EXPECT_EQ(m.e_syn_J, 2.0);
  EXPECT_EQ(m.e_upd_J, 3.0);
  for (double c : m.cov) EXPECT_EQ(c, 0.0);
  EXPECT_EQ(m.n_obs, 2u);
  const auto p = predict_energy(m, 7, 6);
  EXPECT_EQ(p.E, 32.0);
  EXPECT_EQ(p.sigma, 0.0);
  for (const auto& o : kTwoPoint) EXPECT_EQ(predict_energy(m, o.S, o.U).E, o.E_joules);
}

TEST(Fit, PureUpdatePrediction) {
  const auto m = fit_energy_model(kTwoPoint);
  EXPECT_EQ(predict_energy(m, 0, 5).E, 15.0);
}

TEST(Fit, PlantedRecoveryWithoutNoise) {
  const double es = 1e-9, eu = 5e-10;
  std::vector<Observation> obs;
  const double su[][2] = {{1e6, 2e5}, {3e6, 1e5}, {2e6, 7e5}};
  for (const auto& [s, u] : su) obs.push_back({"", s, u, s * es + u * eu, {}});
  const auto m = fit_energy_model(obs);
  EXPECT_NEAR(m.e_syn_J, es, 1e-9 * es);
  EXPECT_NEAR(m.e_upd_J, eu, 1e-9 * eu);
  EXPECT_LT(m.residual_rms, 1e-14 * obs[0].E_joules);
}

TEST(Fit, Errors) {
  EXPECT_EQ(fit_error({{"a", 1, 2, 3, {}}, {"b", 2, 4, 6, {}}}), Errc::kRankDeficient);
  EXPECT_EQ(fit_error({{"a", 1, 2, 3, {}}}), Errc::kRankDeficient);
  EXPECT_EQ(fit_error({}), Errc::kRankDeficient);
  EXPECT_EQ(fit_error({{"a", 1, 0, 3, {}}, {"b", 2, 1e-13, 6, {}}}), Errc::kIllConditioned);
}

TEST(Fit, ScaleEquivariance) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(1e5, 1e6);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Observation> obs;
    for (int k = 0; k < 6; ++k) {
      const double s = u(rng), up = u(rng);
      obs.push_back({"", s, up, (s * 1e-9 + up * 3e-9) * (1 + 0.01 * (u(rng) / 1e6)), {}});
    }
    const auto base = fit_energy_model(obs);
    for (double c : {2.0, 0.25, 1024.0}) {
      auto scaled = obs;
      for (auto& o : scaled) o.E_joules *= c;
      const auto m = fit_energy_model(scaled);
      EXPECT_EQ(m.e_syn_J, c * base.e_syn_J);
      EXPECT_EQ(m.e_upd_J, c * base.e_upd_J);
    }
    auto scaled = obs;
    for (auto& o : scaled) o.E_joules *= 3.7;
    const auto m = fit_energy_model(scaled);
    EXPECT_NEAR(m.e_syn_J, 3.7 * base.e_syn_J, 1e-12 * std::fabs(3.7 * base.e_syn_J));
    EXPECT_NEAR(m.e_upd_J, 3.7 * base.e_upd_J, 1e-12 * std::fabs(3.7 * base.e_upd_J));
  }
}

TEST(Fit, CovarianceSymmetricAndShrinks) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> noise(0.0, 1e-4);
  std::uniform_real_distribution<double> u(1e3, 1e4);
  auto make = [&](int copies) {
    std::vector<Observation> obs;
    for (int c = 0; c < copies; ++c) {
      const double su[][2] = {{2e3, 5e3}, {8e3, 1e3}, {5e3, 5e3}};
      for (const auto& [s, up] : su) {
        obs.push_back({"", s, up, s * 1e-6 + up * 2e-6 + noise(rng), {}});
      }
    }
    return fit_energy_model(obs);
  };
  double previous = std::numeric_limits<double>::infinity();
  for (int copies : {2, 8, 32, 128}) {
    const auto m = make(copies);
    EXPECT_EQ(m.cov[1], m.cov[2]);
    EXPECT_GE(m.cov[0], 0.0);
    EXPECT_GE(m.cov[0] * m.cov[3] - m.cov[1] * m.cov[2], -1e-40);
    const double trace = m.cov[0] + m.cov[3];
    EXPECT_LT(trace, previous);
    previous = trace;
  }
}

TEST(Fit, WeightedMatchesReplicatedRows) {
  const std::vector<Observation> obs = {
      {"a", 1, 2, 3.1, {}}, {"b", 2, 1, 3.9, {}}, {"c", 3, 3, 9.2, {}}};
  const std::vector<double> w = {1, 2, 1};
  const auto weighted = fit_energy_model(obs, w);
  const std::vector<Observation> replicated = {obs[0], obs[1], obs[1], obs[2]};
  const auto plain = fit_energy_model(replicated);
  EXPECT_NEAR(weighted.e_syn_J, plain.e_syn_J, 1e-12);
  EXPECT_NEAR(weighted.e_upd_J, plain.e_upd_J, 1e-12);
}

TEST(Fit, NegativeParameterFlagged) {
  const std::vector<Observation> obs = {{"a", 1, 1, 1, {}}, {"b", 1, 2, 0.5, {}}};
  const auto m = fit_energy_model(obs);
  EXPECT_TRUE(m.has_negative_parameter());
}

TEST(Observation, SilentNetworkUpdates) {
  const auto net = dense_mlp(20, {100}, testing::ifl_model(), Coding::kRate, 64, {});
  const auto o = observation_from_run(net, {0.0, 64.0, 10}, 1e-3, "silent");
  EXPECT_EQ(o.S, 0.0);
  EXPECT_EQ(o.U, 6400.0);
}

TEST(Observation, VggBaselineNeuronCount) {
  const auto net = vgg_baseline(ifl_spike_once(), Coding::kRoc, 64, {});
  EXPECT_EQ(weighted_update_neurons(net), 114798.0);
  const auto o = observation_from_run(net, {1e6, 38.1, 100}, 2e-3);
  EXPECT_DOUBLE_EQ(o.U, 38.1 * 114798);
}

TEST(Observation, MixedKindsWeightedByUpdateCost) {
  NetworkBuilder b({4}, Coding::kRate, 10);
  b.model("ifl", testing::ifl_model()).model("lif", testing::lif_model());
  b.dense(10, "ifl").dense(6, "lif");
  const auto net = b.build();
  // LIF update costs 10/3 EMAC against 4/3 for IFL: ratio 2.5
  EXPECT_NEAR(weighted_update_neurons(net), 10 + 6 * 2.5, 1e-12);
  EXPECT_NEAR(weighted_update_neurons(net, NeuronKind::kLif), 10 / 2.5 + 6, 1e-12);
}

TEST(Observation, MissingMeasurement) {
  const auto net = dense_mlp(2, {3}, testing::ifl_model(), Coding::kRate, 4, {});
  for (auto m : {std::optional<double>{}, std::optional<double>{0.0},
                 std::optional<double>{-1.0}}) {
    try {
      observation_from_run(net, {1, 1, 1}, m);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::kMissingMeasurement);
    }
  }
}

TEST(RunSummary, MergeWeightsBySamples) {
  const auto m = merge_runs({10.0, 2.0, 1}, {20.0, 5.0, 3});
  EXPECT_DOUBLE_EQ(m.mean_events, 17.5);
  EXPECT_DOUBLE_EQ(m.mean_t_used, 4.25);
  EXPECT_EQ(m.samples, 4u);
}

TEST(FloorPower, Subtracted) {
  const std::vector<Observation> obs = {{"a", 1, 1, 2e-3, 1e-3}};
  const auto out = subtract_floor_power(obs, 0.91149);
  EXPECT_DOUBLE_EQ(out[0].E_joules, 2e-3 - 0.91149e-3);
  const std::vector<Observation> no_latency = {{"a", 1, 1, 2e-3, {}}};
  EXPECT_THROW(subtract_floor_power(no_latency, 0.9), Error);
}

TEST(Formats, ObservationsCsvRoundTrip) {
  const std::vector<Observation> obs = {{"cnn-16-16", 123456.5, 9876, 1.25e-3, 6.6e-4},
                                        {"cnn-16-32", 0.1, 3, 7e-9, 1.41e-3}};
  const auto text = format_observations_csv(obs);
  EXPECT_EQ(text.substr(0, text.find('\n')), "name,S,U,E_joules,latency_s");
  const auto back = parse_observations_csv(text);
  ASSERT_EQ(back.size(), 2u);
  for (std::size_t k = 0; k < 2; ++k) {
    EXPECT_EQ(back[k].name, obs[k].name);
    EXPECT_EQ(back[k].S, obs[k].S);
    EXPECT_EQ(back[k].U, obs[k].U);
    EXPECT_EQ(back[k].E_joules, obs[k].E_joules);
    EXPECT_EQ(back[k].latency_s, obs[k].latency_s);
  }
  EXPECT_EQ(parse_observations_csv("name,S,U,E_joules\nx,1,2,3\n")[0].E_joules, 3.0);
  EXPECT_THROW(parse_observations_csv("name,S,E\nx,1,2\n"), Error);
  EXPECT_THROW(parse_observations_csv("name,S,U,E_joules\nx,1,two,3\n"), Error);
}

TEST(Formats, ModelJsonRoundTrip) {
  EnergyModel m{1.5e-9, 2.25e-10, {1e-20, -3e-21, -3e-21, 4e-22}, 1e-6, 7};
  const auto back = parse_model(serialize_model(m));
  EXPECT_EQ(back.e_syn_J, m.e_syn_J);
  EXPECT_EQ(back.e_upd_J, m.e_upd_J);
  EXPECT_EQ(back.cov, m.cov);
  EXPECT_EQ(back.residual_rms, m.residual_rms);
  EXPECT_EQ(back.n_obs, m.n_obs);
  EXPECT_THROW(parse_model("{\"e_syn_J\": 1}"), Error);
}

}  // namespace
}  // namespace emacprof
