/* Copyright 2026 The hierlogic Authors. All Rights Reserved.

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

// hierlogic command-line tool. Every failure prints exactly one line
//   error: <kind>: <message>
// to stderr and exits with 1 (usage), 2 (io), 3 (parse), 4 (validation) or
// 5 (runtime).

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "hierlogic/hierarchy.h"
#include "hierlogic/inference.h"
#include "hierlogic/io.h"
#include "hierlogic/metrics.h"
#include "hierlogic/report.h"
#include "hierlogic/rules.h"
#include "hierlogic/trainer.h"

namespace {

using nlohmann::json;
namespace hl = hierlogic;

enum ExitCode { kOk = 0, kUsage = 1, kIo = 2, kParse = 3, kValidation = 4, kRuntime = 5 };

struct CliError {
  ExitCode code;
  std::string message;
};

std::string OneLine(std::string text) {
  for (char& c : text)
    if (c == '\n' || c == '\r') c = ' ';
  return text;
}

int Fail(ExitCode code, const std::string& message) {
  static constexpr const char* kKinds[] = {"ok", "usage", "io", "parse", "validation", "runtime"};
  std::cerr << "error: " << kKinds[code] << ": " << OneLine(message) << std::endl;
  return code;
}

void RequireReadable(const std::string& path, const char* what) {
  if (path.empty()) throw CliError{kUsage, std::string("--") + what + " is required"};
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError{kIo, std::string("cannot read ") + what + " file: " + path};
}

void RequireSet(const std::string& value, const char* flag) {
  if (value.empty()) throw CliError{kUsage, std::string("--") + flag + " is required"};
}

void SetupLogging(const std::string& fallback) {
  auto logger = spdlog::stderr_color_mt("hierlogic");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  std::string level = fallback;
  if (const char* env = std::getenv("HIERLOGIC_LOG")) level = env;
  spdlog::set_level(spdlog::level::from_str(level));
}

// Flag values captured before merging with an optional config file; only
// flags that were actually passed override the file.
struct Flags {
  std::string config_path;
  hl::RunConfig cfg;
  std::string grad_out;
  std::string losses = "c,d,e";
  std::string scores_out;
  std::string labels_out;
};

hl::RunConfig LoadConfigFile(const std::string& path) {
  RequireReadable(path, "config");
  std::ifstream in(path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw CliError{kParse, std::string("config: ") + e.what()};
  }
  try {
    return hl::RunConfigFromJson(j);
  } catch (const json::exception& e) {
    throw CliError{kParse, std::string("config: ") + e.what()};
  } catch (const std::invalid_argument& e) {
    throw CliError{kParse, e.what()};
  }
}

hl::Hierarchy LoadHierarchy(const hl::RunConfig& cfg) {
  RequireReadable(cfg.hierarchy, "hierarchy");
  return hl::Hierarchy::Load(cfg.hierarchy, hl::PeerScopeFromString(cfg.peer_scope));
}

hl::io::FileFormat Format(const hl::RunConfig& cfg) {
  return hl::io::FileFormatFromString(cfg.format);
}

void PrintJson(const json& j) { std::cout << j.dump(2) << std::endl; }

double SecondsSince(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

int CmdValidate(const hl::RunConfig& cfg) {
  const hl::Hierarchy h = LoadHierarchy(cfg);
  json j = hl::HierarchySummary(h);
  j["paths"] = h.EnumeratePaths().size();
  PrintJson(j);
  return kOk;
}

int CmdLoss(const hl::RunConfig& cfg, const Flags& flags) {
  const hl::Hierarchy h = LoadHierarchy(cfg);
  RequireReadable(cfg.scores, "scores");
  RequireReadable(cfg.labels, "labels");
  const hl::ScoreMap s = hl::io::LoadScores(cfg.scores, Format(cfg), h);
  const hl::LabelMap labels = hl::io::LoadLabels(cfg.labels, Format(cfg), h);
  if (labels.num_pixels() != s.num_pixels())
    throw hl::ShapeError("scores and labels cover different pixel counts");
  hl::rules::LossOptions options;
  options.alpha = cfg.alpha;
  options.threads = cfg.threads;
  const hl::rules::LossReport report =
      hl::rules::TotalLoss(s, labels.MultiHot(h), hl::rules::DeriveRules(h), cfg.fuzzy, options);
  if (!flags.grad_out.empty()) {
    // Gradients are not confined to [0,1], so write them without validation.
    std::ofstream out(flags.grad_out, std::ios::binary);
    if (!out) throw CliError{kIo, "cannot write gradient file: " + flags.grad_out};
    hl::io::WriteScores(out, report.grad);
  }
  PrintJson(hl::ToJson(report, h, cfg.alpha, cfg.fuzzy.q, s.num_pixels()));
  return kOk;
}

int CmdInfer(const hl::RunConfig& cfg) {
  const hl::Hierarchy h = LoadHierarchy(cfg);
  RequireReadable(cfg.scores, "scores");
  RequireSet(cfg.out, "out");
  const hl::ScoreMap s = hl::io::LoadScores(cfg.scores, Format(cfg), h);
  std::optional<hl::LabelMap> labels;
  if (!cfg.labels.empty()) {
    RequireReadable(cfg.labels, "labels");
    labels = hl::io::LoadLabels(cfg.labels, Format(cfg), h);
    if (labels->num_pixels() != s.num_pixels())
      throw hl::ShapeError("scores and labels cover different pixel counts");
  }

  auto start = std::chrono::steady_clock::now();
  const hl::ScoreMap refined = hl::inference::RunInference(s, h, cfg.inference);
  const double infer_seconds = SecondsSince(start);
  start = std::chrono::steady_clock::now();
  const hl::inference::PathPrediction pred =
      hl::inference::DecodePaths(refined, h, cfg.inference.threads);
  const double decode_seconds = SecondsSince(start);

  std::vector<hl::NodeId> leaves(pred.num_pixels());
  for (std::size_t k = 0; k < leaves.size(); ++k) leaves[k] = pred.leaf(k);
  hl::io::SaveLabels(cfg.out, Format(cfg), hl::LabelMap(s.height(), s.width(), std::move(leaves)));

  json j;
  j["iterations"] = cfg.inference.iterations;
  j["engine"] = std::string(hl::inference::ToString(cfg.inference.engine));
  j["e_variant"] = std::string(hl::inference::ToString(cfg.inference.e_variant));
  j["pixels"] = s.num_pixels();
  j["violation_rate_input"] = hl::metrics::ViolationRate(s, h);
  j["violation_rate_refined"] = hl::metrics::ViolationRate(refined, h);
  if (labels) {
    hl::metrics::EvalReport eval = hl::metrics::Evaluate(pred, *labels, h);
    eval.violation_rate = hl::metrics::ViolationRate(refined, h);
    j["eval"] = hl::ToJson(eval, h);
    j["leaf_accuracy"] = hl::metrics::LeafAccuracy(pred, *labels);
  } else {
    j["eval"] = nullptr;
    j["leaf_accuracy"] = nullptr;
  }
  j["timing"] = {{"inference_seconds", infer_seconds}, {"decode_seconds", decode_seconds}};
  PrintJson(j);
  return kOk;
}

int CmdGenData(const hl::RunConfig& cfg, const Flags& flags) {
  const hl::Hierarchy h = LoadHierarchy(cfg);
  RequireSet(flags.scores_out, "scores");
  RequireSet(flags.labels_out, "labels");
  if (!(cfg.flip_rate >= 0.0 && cfg.flip_rate <= 1.0))
    throw std::invalid_argument("--flip must lie in [0,1]");
  const hl::trainer::SyntheticDataset data = hl::trainer::GenerateDataset(h, cfg.dataset);
  const hl::ScoreMap scores =
      hl::trainer::CorruptedOneHot(h, data.labels, cfg.flip_rate, cfg.seed);
  hl::io::SaveScores(flags.scores_out, Format(cfg), scores);
  hl::io::SaveLabels(flags.labels_out, Format(cfg), data.labels);
  PrintJson({{"height", data.labels.height()},
             {"width", data.labels.width()},
             {"nodes", h.size()},
             {"flip_rate", cfg.flip_rate},
             {"seed", cfg.seed},
             {"violation_rate", hl::metrics::ViolationRate(scores, h)}});
  return kOk;
}

void ApplyLossToggles(const std::string& text, hl::trainer::TrainConfig& train) {
  train.use_c = train.use_d = train.use_e = false;
  if (text == "none" || text.empty()) return;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "c") train.use_c = true;
    else if (item == "d") train.use_d = true;
    else if (item == "e") train.use_e = true;
    else throw CliError{kUsage, "--losses takes a comma list of c,d,e or 'none', got '" + item + "'"};
  }
}

int CmdTrainDemo(const hl::RunConfig& cfg) {
  const hl::Hierarchy h = LoadHierarchy(cfg);
  const hl::trainer::SyntheticDataset data = hl::trainer::GenerateDataset(h, cfg.dataset);
  auto model = hl::trainer::LinearLogicModel::Init(h.size(), cfg.dataset.feature_dim, cfg.seed);
  std::optional<std::ofstream> history_file;
  if (!cfg.out.empty()) {
    history_file.emplace(cfg.out);
    if (!*history_file) throw CliError{kIo, "cannot write history file: " + cfg.out};
  }
  const auto result = hl::trainer::Train(model, data, h, cfg.train, [&](const auto& record) {
    const std::string line = hl::ToJson(record).dump();
    std::cout << line << '\n';
    if (history_file) *history_file << line << '\n';
    spdlog::info("epoch {} total {:.6f} violation {:.4f}", record.epoch, record.total,
                 record.violation_rate);
  });
  json final_line = {{"final", hl::ToJson(result.final_report, h)}};
  std::cout << final_line.dump() << std::endl;
  if (history_file) *history_file << final_line.dump() << '\n';
  return kOk;
}

int Run(int argc, char** argv) {
  CLI::App app{"Hierarchy logic losses, message-passing inference and path decoding"};
  app.require_subcommand(1);
  app.fallthrough();

  Flags flags;
  hl::RunConfig& c = flags.cfg;
  std::string engine = "matrix", e_variant = "sender";

  app.add_option("--config", flags.config_path, "JSON run config; flags override it");
  auto* o_hierarchy = app.add_option("--hierarchy", c.hierarchy, "Hierarchy JSON file");
  auto* o_scores = app.add_option("--scores", c.scores, "Score tensor file");
  auto* o_labels = app.add_option("--labels", c.labels, "Label map file");
  auto* o_out = app.add_option("--out", c.out, "Output file");
  auto* o_q = app.add_option("--q", c.fuzzy.q, "Generalized-mean exponent")->capture_default_str();
  auto* o_alpha = app.add_option("--alpha", c.alpha, "Logic loss weight")->capture_default_str();
  auto* o_iters = app.add_option("--iters", c.inference.iterations, "Message-passing iterations")
                      ->capture_default_str();
  auto* o_engine = app.add_option("--engine", engine, "reference|matrix")->capture_default_str();
  auto* o_evariant =
      app.add_option("--e-variant", e_variant, "sender|receiver")->capture_default_str();
  auto* o_seed = app.add_option("--seed", c.seed, "Seed for all randomness")->capture_default_str();
  auto* o_threads =
      app.add_option("--threads", c.threads, "Worker thread cap")->capture_default_str();
  auto* o_format = app.add_option("--format", c.format, "binary|csv")->capture_default_str();
  auto* o_scope =
      app.add_option("--peer-scope", c.peer_scope, "level|siblings")->capture_default_str();
  auto* o_verbosity =
      app.add_option("--verbosity", c.verbosity, "Log level when HIERLOGIC_LOG is unset")
          ->capture_default_str();

  auto* validate = app.add_subcommand("validate", "Check a hierarchy file and summarise it");
  auto* loss = app.add_subcommand("loss", "Evaluate the logic and BCE losses");
  loss->add_option("--grad-out", flags.grad_out, "Write dL/ds as a score tensor");
  auto* infer = app.add_subcommand("infer", "Run message passing and decode paths");
  auto* gen = app.add_subcommand("gen-data", "Write a corrupted one-hot score map and its labels");
  std::optional<double> flip;
  std::optional<std::size_t> height, width;
  gen->add_option("--flip", flip, "Per-level flip probability (default 0.2)");
  gen->add_option("--height", height, "Map height");
  gen->add_option("--width", width, "Map width");
  auto* train = app.add_subcommand("train-demo", "Train the linear demo model");
  std::optional<int> epochs;
  std::optional<double> lr;
  std::optional<std::size_t> batch;
  auto* o_losses = train->add_option("--losses", flags.losses, "Logic losses to enable: c,d,e or none");
  train->add_option("--epochs", epochs, "Epochs");
  train->add_option("--lr", lr, "Learning rate");
  train->add_option("--batch", batch, "Batch size");
  auto* config = app.add_subcommand("config", "Print the effective run config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return Fail(kUsage, e.what());
  }

  hl::RunConfig cfg;
  if (!flags.config_path.empty()) cfg = LoadConfigFile(flags.config_path);
  if (o_hierarchy->count()) cfg.hierarchy = c.hierarchy;
  if (o_scores->count()) cfg.scores = c.scores;
  if (o_labels->count()) cfg.labels = c.labels;
  if (o_out->count()) cfg.out = c.out;
  if (o_q->count()) cfg.fuzzy.q = c.fuzzy.q;
  if (o_alpha->count()) cfg.alpha = c.alpha;
  if (o_iters->count()) cfg.inference.iterations = c.inference.iterations;
  if (o_engine->count()) cfg.inference.engine = hl::inference::EngineFromString(engine);
  if (o_evariant->count()) cfg.inference.e_variant = hl::inference::EVariantFromString(e_variant);
  if (o_seed->count()) cfg.seed = c.seed;
  if (o_threads->count()) cfg.threads = c.threads;
  if (o_format->count()) cfg.format = c.format;
  if (o_scope->count()) cfg.peer_scope = c.peer_scope;
  if (o_verbosity->count()) cfg.verbosity = c.verbosity;
  if (flip) cfg.flip_rate = *flip;
  if (height) cfg.dataset.height = *height;
  if (width) cfg.dataset.width = *width;
  if (epochs) cfg.train.epochs = *epochs;
  if (lr) cfg.train.learning_rate = *lr;
  if (batch) cfg.train.batch_size = *batch;
  if (o_losses->count()) ApplyLossToggles(flags.losses, cfg.train);
  cfg.Propagate();

  SetupLogging(cfg.verbosity);
  cfg.fuzzy.Validate();
  if (cfg.threads < 1) throw CliError{kUsage, "--threads must be >= 1"};
  if (cfg.inference.iterations < 0) throw CliError{kUsage, "--iters must be >= 0"};
  Format(cfg);
  hl::PeerScopeFromString(cfg.peer_scope);
  spdlog::debug("effective config: {}", hl::ToJson(cfg).dump());

  if (validate->parsed()) return CmdValidate(cfg);
  if (loss->parsed()) return CmdLoss(cfg, flags);
  if (infer->parsed()) return CmdInfer(cfg);
  if (gen->parsed()) {
    flags.scores_out = cfg.scores;
    flags.labels_out = cfg.labels;
    return CmdGenData(cfg, flags);
  }
  if (train->parsed()) return CmdTrainDemo(cfg);
  if (config->parsed()) {
    PrintJson(hl::ToJson(cfg));
    return kOk;
  }
  return Fail(kUsage, "no subcommand");
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return Run(argc, argv);
  } catch (const CliError& e) {
    return Fail(e.code, e.message);
  } catch (const hl::ParseError& e) {
    return Fail(kParse, e.what());
  } catch (const hl::ValidationError& e) {
    return Fail(kValidation, e.what());
  } catch (const hl::io::FormatError& e) {
    return Fail(kIo, e.what());
  } catch (const hl::trainer::TrainingDiverged& e) {
    return Fail(kRuntime, e.what());
  } catch (const std::invalid_argument& e) {
    return Fail(kValidation, e.what());
  } catch (const std::exception& e) {
    return Fail(kRuntime, e.what());
  }
}
