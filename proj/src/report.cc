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

#include "hierlogic/report.h"

#include <cmath>
#include <set>
#include <stdexcept>

namespace hierlogic {
namespace {

using nlohmann::json;

void RejectUnknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw std::invalid_argument(where + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw std::invalid_argument(where + ": unknown key '" + key + "'");
  }
}

template <typename T>
void Read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

json NodeMap(const std::vector<double>& values, const Hierarchy& h) {
  json out = json::object();
  for (std::size_t v = 0; v < values.size() && v < h.size(); ++v)
    out[h.node(NodeId(v)).name] = values[v];
  return out;
}

}  // namespace

double RoundTo(double value, int digits) {
  const double scale = std::pow(10.0, digits);
  return std::round(value * scale) / scale;
}

void RunConfig::Propagate() {
  train.alpha = alpha;
  train.q = fuzzy.q;
  train.seed = seed;
  train.threads = threads;
  inference.threads = threads;
  dataset.seed = seed;
}

json ToJson(const RunConfig& cfg) {
  json j;
  j["hierarchy"] = cfg.hierarchy;
  j["scores"] = cfg.scores;
  j["labels"] = cfg.labels;
  j["out"] = cfg.out;
  j["format"] = cfg.format;
  j["peer_scope"] = cfg.peer_scope;
  j["alpha"] = cfg.alpha;
  j["seed"] = cfg.seed;
  j["threads"] = cfg.threads;
  j["verbosity"] = cfg.verbosity;
  j["fuzzy"] = {{"q", cfg.fuzzy.q}, {"eps", cfg.fuzzy.eps}};
  j["inference"] = {{"iterations", cfg.inference.iterations},
                    {"engine", std::string(inference::ToString(cfg.inference.engine))},
                    {"e_variant", std::string(inference::ToString(cfg.inference.e_variant))}};
  j["train"] = {{"learning_rate", cfg.train.learning_rate},
                {"epochs", cfg.train.epochs},
                {"batch_size", cfg.train.batch_size},
                {"use_c", cfg.train.use_c},
                {"use_d", cfg.train.use_d},
                {"use_e", cfg.train.use_e},
                {"train_fraction", cfg.train.train_fraction}};
  j["dataset"] = {{"height", cfg.dataset.height},
                  {"width", cfg.dataset.width},
                  {"feature_dim", cfg.dataset.feature_dim},
                  {"num_blobs", cfg.dataset.num_blobs},
                  {"noise_sigma", cfg.dataset.noise_sigma},
                  {"prototype_scale", cfg.dataset.prototype_scale},
                  {"flip_rate", cfg.flip_rate}};
  return j;
}

RunConfig RunConfigFromJson(const json& j) {
  RunConfig cfg;
  RejectUnknown(j,
                {"hierarchy", "scores", "labels", "out", "format", "peer_scope", "alpha", "seed",
                 "threads", "verbosity", "fuzzy", "inference", "train", "dataset"},
                "config");
  Read(j, "hierarchy", cfg.hierarchy);
  Read(j, "scores", cfg.scores);
  Read(j, "labels", cfg.labels);
  Read(j, "out", cfg.out);
  Read(j, "format", cfg.format);
  Read(j, "peer_scope", cfg.peer_scope);
  Read(j, "alpha", cfg.alpha);
  Read(j, "seed", cfg.seed);
  Read(j, "threads", cfg.threads);
  Read(j, "verbosity", cfg.verbosity);
  if (j.contains("fuzzy")) {
    const json& f = j.at("fuzzy");
    RejectUnknown(f, {"q", "eps"}, "config.fuzzy");
    Read(f, "q", cfg.fuzzy.q);
    Read(f, "eps", cfg.fuzzy.eps);
  }
  if (j.contains("inference")) {
    const json& i = j.at("inference");
    RejectUnknown(i, {"iterations", "engine", "e_variant"}, "config.inference");
    Read(i, "iterations", cfg.inference.iterations);
    if (i.contains("engine"))
      cfg.inference.engine = inference::EngineFromString(i.at("engine").get<std::string>());
    if (i.contains("e_variant"))
      cfg.inference.e_variant =
          inference::EVariantFromString(i.at("e_variant").get<std::string>());
  }
  if (j.contains("train")) {
    const json& t = j.at("train");
    RejectUnknown(t,
                  {"learning_rate", "epochs", "batch_size", "use_c", "use_d", "use_e",
                   "train_fraction"},
                  "config.train");
    Read(t, "learning_rate", cfg.train.learning_rate);
    Read(t, "epochs", cfg.train.epochs);
    Read(t, "batch_size", cfg.train.batch_size);
    Read(t, "use_c", cfg.train.use_c);
    Read(t, "use_d", cfg.train.use_d);
    Read(t, "use_e", cfg.train.use_e);
    Read(t, "train_fraction", cfg.train.train_fraction);
  }
  if (j.contains("dataset")) {
    const json& d = j.at("dataset");
    RejectUnknown(d,
                  {"height", "width", "feature_dim", "num_blobs", "noise_sigma",
                   "prototype_scale", "flip_rate"},
                  "config.dataset");
    Read(d, "height", cfg.dataset.height);
    Read(d, "width", cfg.dataset.width);
    Read(d, "feature_dim", cfg.dataset.feature_dim);
    Read(d, "num_blobs", cfg.dataset.num_blobs);
    Read(d, "noise_sigma", cfg.dataset.noise_sigma);
    Read(d, "prototype_scale", cfg.dataset.prototype_scale);
    Read(d, "flip_rate", cfg.flip_rate);
  }
  cfg.Propagate();
  return cfg;
}

json ToJson(const rules::LossReport& report, const Hierarchy& h, double alpha, int q,
            std::size_t pixels) {
  json j;
  j["alpha"] = alpha;
  j["q"] = q;
  j["pixels"] = pixels;
  j["l_c"] = report.l_c;
  j["l_d"] = report.l_d;
  j["l_e"] = report.l_e;
  j["l_bce"] = report.l_bce;
  j["total"] = report.total;
  j["g_c"] = NodeMap(report.g_c, h);
  j["g_d"] = NodeMap(report.g_d, h);
  j["g_e"] = NodeMap(report.g_e, h);
  return j;
}

json ToJson(const metrics::EvalReport& report, const Hierarchy& h) {
  json j;
  j["pixel_count"] = report.pixel_count;
  j["levels"] = h.levels();
  json miou = json::array();
  for (double m : report.miou_per_level) miou.push_back(RoundTo(m, 2));
  j["miou_per_level"] = miou;
  json per_class = json::object();
  for (std::size_t v = 0; v < report.per_class_iou.size() && v < h.size(); ++v) {
    const auto& iou = report.per_class_iou[v];
    per_class[h.node(NodeId(v)).name] = iou ? json(*iou) : json(nullptr);
  }
  j["per_class_iou"] = per_class;
  j["violation_rate"] = report.violation_rate ? json(*report.violation_rate) : json(nullptr);
  return j;
}

json ToJson(const trainer::EpochRecord& record) {
  return {{"epoch", record.epoch},
          {"l_c", record.l_c},
          {"l_d", record.l_d},
          {"l_e", record.l_e},
          {"l_bce", record.l_bce},
          {"total", record.total},
          {"violation_rate", record.violation_rate},
          {"level_accuracy", record.level_accuracy},
          {"step_seconds", record.step_seconds}};
}

json HierarchySummary(const Hierarchy& h) {
  json per_level = json::array();
  for (const LevelRange& r : h.level_ranges()) per_level.push_back(r.count);
  return {{"name", h.name()},
          {"levels", h.levels()},
          {"nodes", h.size()},
          {"leaves", h.num_leaves()},
          {"roots", h.num_roots()},
          {"nodes_per_level", per_level},
          {"peer_scope", std::string(ToString(h.peer_scope()))}};
}

}  // namespace hierlogic
