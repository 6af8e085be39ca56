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

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "cli.hpp"
#include "emacprof/architectures.hpp"
#include "emacprof/calib.hpp"
#include "emacprof/codec.hpp"
#include "emacprof/engine.hpp"
#include "emacprof/errors.hpp"
#include "emacprof/netspec.hpp"
#include "emacprof/report.hpp"

namespace emacprof::cli {
namespace {

namespace fs = std::filesystem;

struct RunConfig {
  std::string network;
  std::string weights;
  std::string inputs;
  std::string coding;
  std::optional<int> t_max;
  std::uint64_t seed = 0;
  bool encoder_per_step = false;
  unsigned jobs = 1;
  std::string out = ".";
  std::string format = "json";
  std::string encoding = "analog";
};

void add_network_options(CLI::App& cmd, RunConfig& cfg) {
  cmd.add_option("--network", cfg.network, "Network manifest (JSON)")->required();
  cmd.add_option("--weights", cfg.weights,
                 "Weights container; defaults to the manifest with extension .emwt");
}

void add_run_options(CLI::App& cmd, RunConfig& cfg) {
  add_network_options(cmd, cfg);
  cmd.add_option("--inputs", cfg.inputs, "Input tensor file or directory")->required();
  cmd.add_option("--coding", cfg.coding, "Override manifest coding")
      ->check(CLI::IsMember({"rate", "roc"}));
  cmd.add_option("--t-max", cfg.t_max, "Override manifest max_timesteps")
      ->check(CLI::PositiveNumber);
  cmd.add_option("--seed", cfg.seed, "Seed for Poisson encoding");
  cmd.add_flag("--encoder-per-step", cfg.encoder_per_step,
               "Price the analog encoder layer every timestep");
  cmd.add_option("--jobs", cfg.jobs, "Concurrent samples")->check(CLI::PositiveNumber);
  cmd.add_option("--encoding", cfg.encoding, "Input encoding")
      ->check(CLI::IsMember({"analog", "poisson"}));
}

std::string weights_path(const RunConfig& cfg) {
  if (!cfg.weights.empty()) return cfg.weights;
  return fs::path(cfg.network).replace_extension(".emwt").string();
}

NetworkSpec load(const RunConfig& cfg) {
  spdlog::debug("loading {} with weights {}", cfg.network, weights_path(cfg));
  return load_network(cfg.network, weights_path(cfg));
}

InferenceOptions inference_options(const RunConfig& cfg) {
  InferenceOptions opts;
  if (!cfg.coding.empty()) opts.coding = coding_from_string(cfg.coding);
  opts.max_timesteps = cfg.t_max;
  opts.energy.encoder_per_step = cfg.encoder_per_step;
  return opts;
}

EncodingMode encoding_mode(const RunConfig& cfg) {
  return cfg.encoding == "poisson" ? EncodingMode::kPoissonSpikes
                                   : EncodingMode::kAnalogCurrent;
}

std::vector<EncodedInput> load_inputs(const RunConfig& cfg, const NetworkSpec& net) {
  const auto files = list_input_files(cfg.inputs);
  if (files.empty()) {
    throw Error(Errc::kEmptyDataset, "no input tensors under '" + cfg.inputs + "'");
  }
  std::vector<EncodedInput> samples;
  samples.reserve(files.size());
  for (std::size_t k = 0; k < files.size(); ++k) {
    samples.push_back(encode(read_tensor_file(files[k]), net.input_shape(),
                             encoding_mode(cfg), cfg.seed + k));
  }
  spdlog::info("{} input samples from {}", samples.size(), cfg.inputs);
  return samples;
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::kIoError, "cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw Error(Errc::kIoError, "write failed for '" + path.string() + "'");
  spdlog::info("wrote {}", path.string());
}

int exit_code(Errc code) {
  switch (code) {
    case Errc::kNonFiniteState:
      return kExitNumeric;
    case Errc::kRankDeficient:
    case Errc::kIllConditioned:
    case Errc::kMissingMeasurement:
      return kExitCalibration;
    default:
      return kExitValidation;
  }
}

int cmd_inspect(const RunConfig& cfg) {
  const auto net = load(cfg);
  std::cout << inspect_report(net);
  return kExitOk;
}

int report_failures(const AggregateStats& stats) {
  if (stats.failures.empty()) return kExitOk;
  for (const auto& f : stats.failures) {
    std::cerr << "sample " << f.index << ": " << f.message << "\n";
  }
  return kExitNumeric;
}

int cmd_profile(const RunConfig& cfg) {
  const auto net = load(cfg);
  const auto samples = load_inputs(cfg, net);
  const auto stats = run_dataset(net, samples, inference_options(cfg), cfg.jobs);
  const fs::path out(cfg.out);
  ProfileInfo info{cfg.network, cfg.seed, cfg.encoder_per_step, cfg.encoding};
  if (cfg.format != "csv") write_file(out / "energy.json", profile_json(net, stats, info));
  if (cfg.format != "json") write_file(out / "energy.csv", energy_csv(net, stats));
  write_file(out / "spikes.csv", spikes_csv(net, stats));
  write_file(out / "latency.csv", latency_csv(stats));
  std::cout << "samples=" << stats.results.size()
            << " analytic_tot=" << format_number(stats.analytic.tot.mean)
            << " exact_tot=" << format_number(stats.exact.tot.mean) << "\n";
  return report_failures(stats);
}

int cmd_trace(const RunConfig& cfg, std::size_t sample, bool raster) {
  const auto net = load(cfg);
  const auto files = list_input_files(cfg.inputs);
  if (sample >= files.size()) {
    throw Error(Errc::kEmptyDataset, "sample " + std::to_string(sample) +
                                         " out of range (" +
                                         std::to_string(files.size()) + " inputs)");
  }
  const auto input = encode(read_tensor_file(files[sample]), net.input_shape(),
                            encoding_mode(cfg), cfg.seed + sample);
  auto opts = inference_options(cfg);
  opts.record_raster = raster;
  const auto result = run_inference(net, input, opts);
  const fs::path out(cfg.out);
  write_file(out / "trace.csv", trace_csv(result.trace));
  write_file(out / "trace_summary.json", trace_summary_json(net, result));
  if (raster) write_file(out / "raster.csv", raster_csv(result.trace));
  write_file(out / "energy_analytic.csv", energy_report_csv(net, result.analytic));
  write_file(out / "energy_exact_events.csv", energy_report_csv(net, result.exact));
  std::cout << "t_used=" << result.trace.t_used
            << " class=" << result.decision.class_index << "\n";
  return kExitOk;
}

int cmd_calibrate(const std::string& observations, std::optional<double> floor_power,
                  const std::string& out) {
  auto obs = read_observations_csv(observations);
  if (floor_power) obs = subtract_floor_power(obs, *floor_power);
  const auto model = fit_energy_model(obs);
  if (model.has_negative_parameter()) {
    spdlog::warn("fitted model has a negative coefficient");
  }
  const auto text = serialize_model(model);
  if (out.empty()) {
    std::cout << text;
  } else {
    write_file(out, text);
  }
  return kExitOk;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kIoError, "cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int cmd_predict(const std::string& model_path, const std::string& observations,
                const RunConfig& cfg) {
  const auto model = parse_model(read_text(model_path));
  std::cout << "name,S,U,E_joules,sigma\n";
  if (!observations.empty()) {
    for (const auto& o : read_observations_csv(observations)) {
      const auto p = predict_energy(model, o.S, o.U);
      std::cout << o.name << "," << format_number(o.S) << "," << format_number(o.U)
                << "," << format_number(p.E) << "," << format_number(p.sigma) << "\n";
    }
    return kExitOk;
  }
  if (cfg.network.empty() || cfg.inputs.empty()) {
    throw Error(Errc::kInvalidInput, "predict needs --observations or --network and --inputs");
  }
  const auto net = load(cfg);
  const auto stats = run_dataset(net, load_inputs(cfg, net), inference_options(cfg), cfg.jobs);
  const auto run = summarize_run(stats);
  const double U = run.mean_t_used * weighted_update_neurons(net);
  const auto p = predict_energy(model, run.mean_events, U);
  std::cout << fs::path(cfg.network).stem().string() << "," << format_number(run.mean_events)
            << "," << format_number(U) << "," << format_number(p.E) << ","
            << format_number(p.sigma) << "\n";
  return report_failures(stats);
}

struct SynthConfig {
  std::string arch;
  std::uint64_t seed = 0;
  std::string out = ".";
  std::size_t samples = 0;
  double intensity = 0.05;
};

int cmd_synth(const SynthConfig& cfg) {
  const WeightInit init{cfg.seed, 0.0, 1.0};
  NetworkSpec net;
  if (auto cnn = reference_cnn(cfg.arch, init)) {
    net = std::move(*cnn);
  } else if (cfg.arch == "vgg") {
    net = vgg_baseline(ifl_spike_once(), Coding::kRoc, 64, init);
  } else if (cfg.arch == "mlp") {
    net = dense_mlp(784, {128, 10}, NeuronModelSpec{}, Coding::kRate, 32, init);
  } else if (cfg.arch == "lcl-mlp") {
    net = lcl_mlp({1, 28, 28}, 8, 5, 3, {64, 10}, NeuronModelSpec{}, Coding::kRate, 32,
                  init);
  } else {
    throw Error(Errc::kInvalidInput, "unknown architecture '" + cfg.arch + "'");
  }
  const fs::path out(cfg.out);
  fs::create_directories(out);
  save_network(net, (out / "network.json").string(), (out / "network.emwt").string());
  std::mt19937_64 gen(cfg.seed);
  for (std::size_t k = 0; k < cfg.samples; ++k) {
    Tensor t{net.input_shape(),
             std::vector<float>(static_cast<std::size_t>(num_elements(net.input_shape())))};
    for (auto& v : t.values) {
      v = static_cast<float>(cfg.intensity * static_cast<double>(gen() >> 11) * 0x1.0p-53);
    }
    char name[32];
    std::snprintf(name, sizeof(name), "sample_%04zu.bin", k);
    fs::create_directories(out / "inputs");
    write_tensor_bin(t, (out / "inputs" / name).string());
  }
  std::cout << "wrote " << (out / "network.json").string() << "\n";
  return kExitOk;
}

void configure_logging() {
  auto logger = spdlog::stderr_color_mt("emacprof");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("EMACPROF_LOG")) {
    spdlog::set_level(spdlog::level::from_str(env));
  }
}

}  // namespace

int run(int argc, char** argv) {
  configure_logging();

  CLI::App app{"EMAC energy profiler for spiking neural networks"};
  app.require_subcommand(1);

  RunConfig cfg;
  auto* inspect = app.add_subcommand("inspect", "Print structural counts and energy prices");
  add_network_options(*inspect, cfg);

  auto* profile = app.add_subcommand("profile", "Run a dataset and write energy reports");
  add_run_options(*profile, cfg);
  profile->add_option("--out", cfg.out, "Output directory");
  profile->add_option("--format", cfg.format, "Energy report format")
      ->check(CLI::IsMember({"json", "csv", "both"}));

  std::size_t sample = 0;
  bool raster = false;
  auto* trace = app.add_subcommand("trace", "Write per-timestep spike counts for one sample");
  add_run_options(*trace, cfg);
  trace->add_option("--out", cfg.out, "Output directory");
  trace->add_option("--sample", sample, "Index of the input file");
  trace->add_flag("--raster", raster, "Also write every spike to raster.csv");

  std::string observations;
  std::optional<double> floor_power;
  std::string model_out;
  auto* calibrate = app.add_subcommand("calibrate", "Fit (e_syn, e_upd) in joules");
  calibrate->add_option("--observations", observations, "Observations CSV")->required();
  calibrate->add_option("--floor-power", floor_power,
                        "Idle power in watts subtracted using latency_s");
  calibrate->add_option("--out", model_out, "Model JSON path (stdout when omitted)");

  std::string model_in;
  auto* predict = app.add_subcommand("predict", "Predict joules with a fitted model");
  predict->add_option("--model", model_in, "Model JSON")->required();
  predict->add_option("--observations", observations, "Observations CSV to predict");
  predict->add_option("--network", cfg.network, "Network manifest");
  predict->add_option("--weights", cfg.weights, "Weights container");
  predict->add_option("--inputs", cfg.inputs, "Input tensor file or directory");
  predict->add_option("--coding", cfg.coding, "Override manifest coding")
      ->check(CLI::IsMember({"rate", "roc"}));
  predict->add_option("--t-max", cfg.t_max, "Override manifest max_timesteps");
  predict->add_option("--seed", cfg.seed, "Seed for Poisson encoding");
  predict->add_option("--jobs", cfg.jobs, "Concurrent samples");
  predict->add_option("--encoding", cfg.encoding, "Input encoding")
      ->check(CLI::IsMember({"analog", "poisson"}));

  SynthConfig synth_cfg;
  auto* synth = app.add_subcommand("synth", "Write a built-in architecture with random weights");
  synth->add_option("--arch", synth_cfg.arch,
                    "cnn-16-16, cnn-16-32, cnn-32-32-64, vgg, mlp or lcl-mlp")
      ->required();
  synth->add_option("--seed", synth_cfg.seed, "Weight and input seed");
  synth->add_option("--out", synth_cfg.out, "Output directory");
  synth->add_option("--samples", synth_cfg.samples, "Random input tensors to write");
  synth->add_option("--intensity", synth_cfg.intensity, "Upper bound of input pixels");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (inspect->parsed()) return cmd_inspect(cfg);
    if (profile->parsed()) return cmd_profile(cfg);
    if (trace->parsed()) return cmd_trace(cfg, sample, raster);
    if (calibrate->parsed()) return cmd_calibrate(observations, floor_power, model_out);
    if (predict->parsed()) return cmd_predict(model_in, observations, cfg);
    if (synth->parsed()) return cmd_synth(synth_cfg);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitValidation;
}

}  // namespace emacprof::cli
