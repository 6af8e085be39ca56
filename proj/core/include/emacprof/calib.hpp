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

#ifndef EMACPROF_CALIB_HPP_
#define EMACPROF_CALIB_HPP_

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "emacprof/engine.hpp"
#include "emacprof/netspec.hpp"

namespace emacprof {

// One reference network measured on hardware. S is synaptic events and U
// neuron updates per inference; E is joules per inference.
struct Observation {
  std::string name;
  double S = 0.0;
  double U = 0.0;
  double E_joules = 0.0;
  std::optional<double> latency_s;  // used only for floor-power subtraction
};

// Dimensional two-parameter model E = S * e_syn_J + U * e_upd_J.
struct EnergyModel {
  double e_syn_J = 0.0;
  double e_upd_J = 0.0;
  std::array<double, 4> cov{};  // row-major 2x2, joules^2
  double residual_rms = 0.0;
  std::size_t n_obs = 0;

  // A negative coefficient means the linear model does not fit the data.
  bool has_negative_parameter() const { return e_syn_J < 0 || e_upd_J < 0; }
};

struct Prediction {
  double E = 0.0;
  double sigma = 0.0;
};

inline constexpr double kMaxConditionNumber = 1e12;

// Least squares without intercept. cov = s^2 (X^T W X)^-1 with
// s^2 = RSS / max(n - 2, 1); exactly two observations interpolate and give a
// zero covariance. `weights` (optional) are per-observation inverse
// variances.
EnergyModel fit_energy_model(std::span<const Observation> observations,
                             std::span<const double> weights = {});

// First-order propagation: sigma^2 = [S U] cov [S U]^T.
Prediction predict_energy(const EnergyModel& model, double S, double U);

// Dataset means that feed one observation.
struct RunSummary {
  double mean_events = 0.0;   // S
  double mean_t_used = 0.0;
  std::size_t samples = 0;
};

RunSummary summarize_run(const AggregateStats& stats);

// Sample-count weighted merge of two runs of the same network.
RunSummary merge_runs(const RunSummary& a, const RunSummary& b);

// Neuron updates per timestep, each layer weighted by its kind's e_upd
// relative to `reference`. Defaults to the kind of the first spiking layer,
// which makes a single-kind network count plain neurons.
double weighted_update_neurons(const NetworkSpec& net,
                               std::optional<NeuronKind> reference = {});

Observation observation_from_run(const NetworkSpec& net, const RunSummary& run,
                                 std::optional<double> measured_joules,
                                 const std::string& name = {},
                                 std::optional<NeuronKind> reference = {});

// Subtracts floor_power_W * latency_s from every observation; each one must
// carry a latency.
std::vector<Observation> subtract_floor_power(std::span<const Observation> obs,
                                              double floor_power_W);

// CSV with header `name,S,U,E_joules` and an optional trailing `latency_s`.
std::vector<Observation> read_observations_csv(const std::string& path);
std::vector<Observation> parse_observations_csv(const std::string& text);
std::string format_observations_csv(std::span<const Observation> obs);

// JSON with fields e_syn_J, e_upd_J, cov (row-major), residual_rms, n_obs.
std::string serialize_model(const EnergyModel& model);
EnergyModel parse_model(const std::string& json_text);

}  // namespace emacprof

#endif  // EMACPROF_CALIB_HPP_
