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

// Golden JSON comparison: identical key sets and value types, numbers within
// 1e-9, and any "timing" member skipped. Set HIERLOGIC_UPDATE_GOLDEN=1 to
// rewrite the files instead.

#ifndef HIERLOGIC_TESTS_GOLDEN_H_
#define HIERLOGIC_TESTS_GOLDEN_H_

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <string>

#include "json.hpp"

namespace hierlogic::testing {

inline std::string GoldenPath(const std::string& name) {
  return std::string(HIERLOGIC_TESTS_DIR) + "/golden/" + name;
}

// Returns an empty string on match, otherwise the first difference.
inline std::string JsonDiff(const nlohmann::json& want, const nlohmann::json& got,
                            const std::string& where = "$") {
  if (want.is_number() && got.is_number()) {
    const double a = want.get<double>(), b = got.get<double>();
    if (want.is_number_float() != got.is_number_float())
      return where + ": integer/float mismatch";
    return std::abs(a - b) <= 1e-9 ? "" : where + ": " + want.dump() + " != " + got.dump();
  }
  if (want.type() != got.type()) return where + ": type " + want.type_name() + " != " + got.type_name();
  if (want.is_object()) {
    for (const auto& [key, value] : want.items()) {
      if (key == "timing") continue;
      if (!got.contains(key)) return where + ": missing key " + key;
      const std::string d = JsonDiff(value, got.at(key), where + "." + key);
      if (!d.empty()) return d;
    }
    for (const auto& [key, value] : got.items())
      if (!want.contains(key)) return where + ": unexpected key " + key;
    return "";
  }
  if (want.is_array()) {
    if (want.size() != got.size()) return where + ": array length differs";
    for (std::size_t i = 0; i < want.size(); ++i) {
      const std::string d = JsonDiff(want[i], got[i], where + "[" + std::to_string(i) + "]");
      if (!d.empty()) return d;
    }
    return "";
  }
  return want == got ? "" : where + ": " + want.dump() + " != " + got.dump();
}

inline std::string CompareGolden(const std::string& name, const nlohmann::json& got) {
  const std::string path = GoldenPath(name);
  if (const char* update = std::getenv("HIERLOGIC_UPDATE_GOLDEN"); update && *update == '1') {
    std::ofstream(path) << got.dump(2) << '\n';
    return "";
  }
  std::ifstream in(path);
  if (!in) return "missing golden file " + path;
  return JsonDiff(nlohmann::json::parse(in), got);
}

}  // namespace hierlogic::testing

#endif  // HIERLOGIC_TESTS_GOLDEN_H_
