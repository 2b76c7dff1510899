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

#ifndef HIERLOGIC_REPORT_H_
#define HIERLOGIC_REPORT_H_

#include <string>

#include "json.hpp"
#include "hierlogic/fuzzy.h"
#include "hierlogic/hierarchy.h"
#include "hierlogic/inference.h"
#include "hierlogic/metrics.h"
#include "hierlogic/rules.h"
#include "hierlogic/trainer.h"

namespace hierlogic {

// Everything a CLI invocation needs; serialises to and from JSON so a run can
// be replayed from a config file.
struct RunConfig {
  std::string hierarchy;
  std::string scores;
  std::string labels;
  std::string out;
  std::string format = "binary";
  std::string peer_scope = "level";
  double alpha = 0.2;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string verbosity = "warn";
  fuzzy::FuzzyConfig fuzzy;
  inference::InferenceConfig inference;
  trainer::TrainConfig train;
  trainer::DatasetSpec dataset;
  double flip_rate = 0.2;

  // Copies the shared knobs (alpha, q, seed, threads) into the sub-configs.
  void Propagate();
};

nlohmann::json ToJson(const RunConfig& cfg);
// Missing keys keep their defaults; unknown keys are rejected.
RunConfig RunConfigFromJson(const nlohmann::json& j);

// Report schemas written by the CLI.
nlohmann::json ToJson(const rules::LossReport& report, const Hierarchy& h, double alpha, int q,
                      std::size_t pixels);
nlohmann::json ToJson(const metrics::EvalReport& report, const Hierarchy& h);
nlohmann::json ToJson(const trainer::EpochRecord& record);
nlohmann::json HierarchySummary(const Hierarchy& h);

// Rounds to `digits` decimals for display.
double RoundTo(double value, int digits);

}  // namespace hierlogic

#endif  // HIERLOGIC_REPORT_H_
