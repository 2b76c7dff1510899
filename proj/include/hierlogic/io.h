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

#ifndef HIERLOGIC_IO_H_
#define HIERLOGIC_IO_H_

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>

#include "hierlogic/hierarchy.h"
#include "hierlogic/score_map.h"

namespace hierlogic::io {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class FileFormat { kBinary, kCsv };
FileFormat FileFormatFromString(std::string_view text);

// Binary score tensor:
//   "LSG1" | u32 num_nodes | u32 height | u32 width |
//   num_nodes*height*width f32, node-major then row-major pixels.
// Binary label map:
//   "LSL1" | u32 height | u32 width | height*width u32 leaf ids.
// All integers and floats little-endian.
//
// CSV scores: first line "height,width", then one line per pixel (row-major)
// holding |V| comma-separated values in canonical node order.
// CSV labels: first line "height,width", then one line per pixel holding a
// leaf id or leaf name.

ScoreMap ReadScores(std::istream& in);
void WriteScores(std::ostream& out, const ScoreMap& s);
LabelMap ReadLabels(std::istream& in);
void WriteLabels(std::ostream& out, const LabelMap& labels);

ScoreMap ReadScoresCsv(std::istream& in, std::size_t num_nodes);
void WriteScoresCsv(std::ostream& out, const ScoreMap& s);
LabelMap ReadLabelsCsv(std::istream& in, const Hierarchy& h);
void WriteLabelsCsv(std::ostream& out, const LabelMap& labels);

// File-path wrappers; throw FormatError on IO failure.
ScoreMap LoadScores(const std::string& path, FileFormat format, const Hierarchy& h);
void SaveScores(const std::string& path, FileFormat format, const ScoreMap& s);
LabelMap LoadLabels(const std::string& path, FileFormat format, const Hierarchy& h);
void SaveLabels(const std::string& path, FileFormat format, const LabelMap& labels);

}  // namespace hierlogic::io

#endif  // HIERLOGIC_IO_H_
