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

#include "emacprof/calib.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "emacprof/errors.hpp"
#include "emacprof/neuron.hpp"

namespace emacprof {

EnergyModel fit_energy_model(std::span<const Observation> observations,
                             std::span<const double> weights) {
  const auto n = static_cast<Eigen::Index>(observations.size());
  if (n < 2) {
    throw Error(Errc::kRankDeficient, "rank deficient: need at least 2 observations");
  }
  if (!weights.empty() && static_cast<Eigen::Index>(weights.size()) != n) {
    throw Error(Errc::kInvalidInput, "one weight per observation required");
  }

  Eigen::MatrixX2d X(n, 2);
  Eigen::VectorXd y(n);
  Eigen::VectorXd sqrt_w = Eigen::VectorXd::Ones(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto& o = observations[static_cast<std::size_t>(k)];
    if (!std::isfinite(o.S) || !std::isfinite(o.U) || !std::isfinite(o.E_joules)) {
      throw Error(Errc::kInvalidInput, "observation '" + o.name + "' is not finite");
    }
    X(k, 0) = o.S;
    X(k, 1) = o.U;
    y(k) = o.E_joules;
    if (!weights.empty()) {
      const double w = weights[static_cast<std::size_t>(k)];
      if (!(w > 0) || !std::isfinite(w)) {
        throw Error(Errc::kInvalidInput, "weights must be positive and finite");
      }
      sqrt_w(k) = std::sqrt(w);
    }
  }

  const Eigen::JacobiSVD<Eigen::MatrixX2d> svd(X);
  const auto sv = svd.singularValues();
  const double eps = std::numeric_limits<double>::epsilon();
  if (!(sv(0) > 0) || sv(1) <= sv(0) * static_cast<double>(n) * eps) {
    throw Error(Errc::kRankDeficient, "rank deficient: observations are collinear");
  }
  const double cond = sv(0) / sv(1);
  if (cond >= kMaxConditionNumber) {
    std::ostringstream msg;
    msg << "ill conditioned: condition number " << cond;
    throw Error(Errc::kIllConditioned, msg.str());
  }

  EnergyModel model;
  model.n_obs = observations.size();

  if (n == 2) {
    // Square system: interpolate, no residual, no spread.
    const double det = X(0, 0) * X(1, 1) - X(0, 1) * X(1, 0);
    model.e_syn_J = (y(0) * X(1, 1) - X(0, 1) * y(1)) / det;
    model.e_upd_J = (X(0, 0) * y(1) - y(0) * X(1, 0)) / det;
    return model;
  }

  Eigen::MatrixX2d Xw = sqrt_w.asDiagonal() * X;
  const Eigen::VectorXd yw = sqrt_w.asDiagonal() * y;
  const Eigen::Vector2d scale = Xw.colwise().norm().transpose();
  Xw.col(0) /= scale(0);
  Xw.col(1) /= scale(1);

  const Eigen::ColPivHouseholderQR<Eigen::MatrixX2d> qr(Xw);
  const Eigen::Vector2d beta_scaled = qr.solve(yw);
  const Eigen::Vector2d beta = beta_scaled.cwiseQuotient(scale);
  model.e_syn_J = beta(0);
  model.e_upd_J = beta(1);

  const Eigen::VectorXd residual = y - X * beta;
  const Eigen::VectorXd weighted_residual = sqrt_w.asDiagonal() * residual;
  const double rss = weighted_residual.squaredNorm();
  model.residual_rms = std::sqrt(residual.squaredNorm() / static_cast<double>(n));

  const double sigma2 = rss / static_cast<double>(std::max<Eigen::Index>(n - 2, 1));
  const Eigen::Matrix2d gram_inv = (Xw.transpose() * Xw).inverse();
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      model.cov[2 * r + c] = sigma2 * gram_inv(r, c) / (scale(r) * scale(c));
    }
  }
  // Exact symmetry.
  model.cov[2] = model.cov[1];
  return model;
}

Prediction predict_energy(const EnergyModel& model, double S, double U) {
  const double e = S * model.e_syn_J + U * model.e_upd_J;
  const double var = S * (model.cov[0] * S + model.cov[1] * U) +
                     U * (model.cov[2] * S + model.cov[3] * U);
  return {e, std::sqrt(std::max(var, 0.0))};
}

RunSummary summarize_run(const AggregateStats& stats) {
  return {stats.synaptic_events.mean, stats.t_used.mean, stats.results.size()};
}

RunSummary merge_runs(const RunSummary& a, const RunSummary& b) {
  const std::size_t n = a.samples + b.samples;
  if (n == 0) return {};
  const double wa = static_cast<double>(a.samples) / static_cast<double>(n);
  const double wb = static_cast<double>(b.samples) / static_cast<double>(n);
  return {a.mean_events * wa + b.mean_events * wb,
          a.mean_t_used * wa + b.mean_t_used * wb, n};
}

double weighted_update_neurons(const NetworkSpec& net,
                               std::optional<NeuronKind> reference) {
  if (!reference) {
    const auto first = first_spiking_layer(net);
    if (first == net.layers.size()) return 0.0;
    reference = net.model_of(first)->kind;
  }
  const double ref = energy_params(*reference).e_upd;
  double total = 0.0;
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const auto* m = net.model_of(l);
    if (!m || !m->is_spiking()) continue;
    const double ratio = energy_params(m->kind).e_upd / ref;
    total += static_cast<double>(num_elements(net.layers[l].output_shape)) * ratio;
  }
  return total;
}

Observation observation_from_run(const NetworkSpec& net, const RunSummary& run,
                                 std::optional<double> measured_joules,
                                 const std::string& name,
                                 std::optional<NeuronKind> reference) {
  if (!measured_joules || !std::isfinite(*measured_joules) || *measured_joules <= 0) {
    throw Error(Errc::kMissingMeasurement,
                "observation '" + name + "' needs a positive measured energy");
  }
  Observation o;
  o.name = name;
  o.S = run.mean_events;
  o.U = run.mean_t_used * weighted_update_neurons(net, reference);
  o.E_joules = *measured_joules;
  if (!(o.U > 0)) {
    throw Error(Errc::kInvalidInput,
                "observation '" + name + "' has no spiking neuron updates");
  }
  return o;
}

std::vector<Observation> subtract_floor_power(std::span<const Observation> obs,
                                              double floor_power_W) {
  std::vector<Observation> out(obs.begin(), obs.end());
  for (auto& o : out) {
    if (!o.latency_s) {
      throw Error(Errc::kMissingMeasurement,
                  "floor-power subtraction needs latency_s for '" + o.name + "'");
    }
    o.E_joules -= floor_power_W * *o.latency_s;
  }
  return out;
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    cells.push_back(cell);
  }
  return cells;
}

double number(const std::string& cell, std::size_t line) {
  double v = 0;
  auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc{} || p != cell.data() + cell.size()) {
    throw Error(Errc::kSchemaError, "observations line " + std::to_string(line) +
                                        ": bad number '" + cell + "'");
  }
  return v;
}

std::string shortest(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

}  // namespace

std::vector<Observation> parse_observations_csv(const std::string& text) {
  std::stringstream in(text);
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(Errc::kSchemaError, "observations: empty file");
  }
  const auto header = split(line);
  const bool has_latency = header.size() == 5 && header[4] == "latency_s";
  if (header.size() < 4 || header[0] != "name" || header[1] != "S" ||
      header[2] != "U" || header[3] != "E_joules" ||
      (header.size() == 5 && !has_latency) || header.size() > 5) {
    throw Error(Errc::kSchemaError,
                "observations: header must be name,S,U,E_joules[,latency_s]");
  }
  std::vector<Observation> obs;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) {
      throw Error(Errc::kSchemaError,
                  "observations line " + std::to_string(lineno) + ": expected " +
                      std::to_string(header.size()) + " fields");
    }
    Observation o{cells[0], number(cells[1], lineno), number(cells[2], lineno),
                  number(cells[3], lineno), std::nullopt};
    if (has_latency) o.latency_s = number(cells[4], lineno);
    obs.push_back(std::move(o));
  }
  return obs;
}

std::vector<Observation> read_observations_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kIoError, "cannot open '" + path + "'");
  return parse_observations_csv(
      {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()});
}

std::string format_observations_csv(std::span<const Observation> obs) {
  bool latency = !obs.empty();
  for (const auto& o : obs) latency = latency && o.latency_s.has_value();
  std::string out = latency ? "name,S,U,E_joules,latency_s\n" : "name,S,U,E_joules\n";
  for (const auto& o : obs) {
    out += o.name + "," + shortest(o.S) + "," + shortest(o.U) + "," +
           shortest(o.E_joules);
    if (latency) out += "," + shortest(*o.latency_s);
    out += "\n";
  }
  return out;
}

std::string serialize_model(const EnergyModel& model) {
  nlohmann::json j;
  j["e_syn_J"] = model.e_syn_J;
  j["e_upd_J"] = model.e_upd_J;
  j["cov"] = model.cov;
  j["residual_rms"] = model.residual_rms;
  j["n_obs"] = model.n_obs;
  return j.dump(2) + "\n";
}

EnergyModel parse_model(const std::string& json_text) {
  try {
    const auto j = nlohmann::json::parse(json_text);
    EnergyModel m;
    m.e_syn_J = j.at("e_syn_J").get<double>();
    m.e_upd_J = j.at("e_upd_J").get<double>();
    const auto cov = j.at("cov").get<std::vector<double>>();
    if (cov.size() != 4) throw Error(Errc::kSchemaError, "model: cov needs 4 values");
    std::copy(cov.begin(), cov.end(), m.cov.begin());
    m.residual_rms = j.value("residual_rms", 0.0);
    m.n_obs = j.value("n_obs", std::size_t{0});
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kSchemaError, std::string("model: ") + e.what());
  }
}

}  // namespace emacprof
