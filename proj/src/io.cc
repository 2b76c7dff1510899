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

#include "hierlogic/io.h"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace hierlogic::io {
namespace {

constexpr std::array<char, 4> kScoreMagic{'L', 'S', 'G', '1'};
constexpr std::array<char, 4> kLabelMagic{'L', 'S', 'L', '1'};

void PutU32(std::ostream& out, std::uint32_t value) {
  const std::array<char, 4> bytes{static_cast<char>(value & 0xff),
                                  static_cast<char>((value >> 8) & 0xff),
                                  static_cast<char>((value >> 16) & 0xff),
                                  static_cast<char>((value >> 24) & 0xff)};
  out.write(bytes.data(), bytes.size());
}

std::uint32_t GetU32(std::istream& in) {
  std::array<unsigned char, 4> bytes{};
  if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size()))
    throw FormatError("truncated file");
  return std::uint32_t(bytes[0]) | (std::uint32_t(bytes[1]) << 8) |
         (std::uint32_t(bytes[2]) << 16) | (std::uint32_t(bytes[3]) << 24);
}

void ExpectMagic(std::istream& in, const std::array<char, 4>& magic) {
  std::array<char, 4> got{};
  if (!in.read(got.data(), got.size()) || got != magic)
    throw FormatError(std::string("bad magic, expected ") + std::string(magic.data(), 4));
}

void ExpectEnd(std::istream& in) {
  if (in.peek() != std::char_traits<char>::eof()) throw FormatError("trailing bytes after payload");
}

std::uint32_t DecodeU32(const unsigned char* b) {
  return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) | (std::uint32_t(b[2]) << 16) |
         (std::uint32_t(b[3]) << 24);
}

void EncodeU32(std::uint32_t value, unsigned char* b) {
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((value >> (8 * i)) & 0xff);
}

// Reads `count` little-endian u32 words in one go.
std::vector<std::uint32_t> GetWords(std::istream& in, std::size_t count) {
  std::vector<unsigned char> bytes(count * 4);
  if (!in.read(reinterpret_cast<char*>(bytes.data()), std::streamsize(bytes.size())))
    throw FormatError("truncated payload");
  std::vector<std::uint32_t> words(count);
  for (std::size_t i = 0; i < count; ++i) words[i] = DecodeU32(bytes.data() + 4 * i);
  return words;
}

void PutWords(std::ostream& out, const std::vector<std::uint32_t>& words) {
  std::vector<unsigned char> bytes(words.size() * 4);
  for (std::size_t i = 0; i < words.size(); ++i) EncodeU32(words[i], bytes.data() + 4 * i);
  out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
}

std::uint32_t CheckedU32(std::size_t value, const char* what) {
  if (value > 0xffffffffu) throw FormatError(std::string(what) + " does not fit in u32");
  return static_cast<std::uint32_t>(value);
}

std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) {
    const auto first = field.find_first_not_of(" \t\r");
    const auto last = field.find_last_not_of(" \t\r");
    fields.push_back(first == std::string::npos ? "" : field.substr(first, last - first + 1));
  }
  return fields;
}

template <typename T>
T ParseNumber(const std::string& text) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw FormatError("bad number in CSV: '" + text + "'");
  return value;
}

std::pair<std::size_t, std::size_t> ReadCsvHeader(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("CSV: missing height,width header");
  const auto fields = SplitCsv(line);
  if (fields.size() != 2) throw FormatError("CSV: header must be 'height,width'");
  return {ParseNumber<std::size_t>(fields[0]), ParseNumber<std::size_t>(fields[1])};
}

}  // namespace

FileFormat FileFormatFromString(std::string_view text) {
  if (text == "binary") return FileFormat::kBinary;
  if (text == "csv") return FileFormat::kCsv;
  throw std::invalid_argument("unknown format: " + std::string(text));
}

ScoreMap ReadScores(std::istream& in) {
  ExpectMagic(in, kScoreMagic);
  const std::uint32_t nodes = GetU32(in);
  const std::uint32_t height = GetU32(in);
  const std::uint32_t width = GetU32(in);
  ScoreMap s(nodes, height, width, 0.0);
  const auto words = GetWords(in, s.values().size());
  for (std::size_t i = 0; i < words.size(); ++i) s.values()[i] = std::bit_cast<float>(words[i]);
  ExpectEnd(in);
  return s;
}

void WriteScores(std::ostream& out, const ScoreMap& s) {
  out.write(kScoreMagic.data(), kScoreMagic.size());
  PutU32(out, CheckedU32(s.num_nodes(), "node count"));
  PutU32(out, CheckedU32(s.height(), "height"));
  PutU32(out, CheckedU32(s.width(), "width"));
  std::vector<std::uint32_t> words(s.values().size());
  for (std::size_t i = 0; i < words.size(); ++i)
    words[i] = std::bit_cast<std::uint32_t>(static_cast<float>(s.values()[i]));
  PutWords(out, words);
}

LabelMap ReadLabels(std::istream& in) {
  ExpectMagic(in, kLabelMagic);
  const std::uint32_t height = GetU32(in);
  const std::uint32_t width = GetU32(in);
  std::vector<NodeId> leaves = GetWords(in, std::size_t(height) * width);
  ExpectEnd(in);
  return LabelMap(height, width, std::move(leaves));
}

void WriteLabels(std::ostream& out, const LabelMap& labels) {
  out.write(kLabelMagic.data(), kLabelMagic.size());
  PutU32(out, CheckedU32(labels.height(), "height"));
  PutU32(out, CheckedU32(labels.width(), "width"));
  PutWords(out, labels.leaves());
}

ScoreMap ReadScoresCsv(std::istream& in, std::size_t num_nodes) {
  const auto [height, width] = ReadCsvHeader(in);
  ScoreMap s(num_nodes, height, width, 0.0);
  std::string line;
  for (std::size_t k = 0; k < height * width; ++k) {
    if (!std::getline(in, line)) throw FormatError("CSV: fewer pixel rows than height*width");
    const auto fields = SplitCsv(line);
    if (fields.size() != num_nodes)
      throw FormatError("CSV: pixel row " + std::to_string(k) + " has " +
                        std::to_string(fields.size()) + " values, expected " +
                        std::to_string(num_nodes));
    for (std::size_t v = 0; v < num_nodes; ++v) s.at(v, k) = ParseNumber<double>(fields[v]);
  }
  return s;
}

void WriteScoresCsv(std::ostream& out, const ScoreMap& s) {
  out << s.height() << ',' << s.width() << '\n';
  out.precision(17);
  for (std::size_t k = 0; k < s.num_pixels(); ++k) {
    for (std::size_t v = 0; v < s.num_nodes(); ++v) out << (v ? "," : "") << s.at(v, k);
    out << '\n';
  }
}

LabelMap ReadLabelsCsv(std::istream& in, const Hierarchy& h) {
  const auto [height, width] = ReadCsvHeader(in);
  std::vector<NodeId> leaves(height * width);
  std::string line;
  for (std::size_t k = 0; k < leaves.size(); ++k) {
    if (!std::getline(in, line)) throw FormatError("CSV: fewer label rows than height*width");
    const auto fields = SplitCsv(line);
    if (fields.size() != 1) throw FormatError("CSV: label rows hold exactly one value");
    const std::string& token = fields[0];
    if (!token.empty() && std::all_of(token.begin(), token.end(), ::isdigit)) {
      leaves[k] = ParseNumber<NodeId>(token);
    } else {
      auto id = h.Find(token);
      if (!id) throw FormatError("CSV: unknown label '" + token + "'");
      leaves[k] = *id;
    }
  }
  return LabelMap(height, width, std::move(leaves));
}

void WriteLabelsCsv(std::ostream& out, const LabelMap& labels) {
  out << labels.height() << ',' << labels.width() << '\n';
  for (NodeId leaf : labels.leaves()) out << leaf << '\n';
}

ScoreMap LoadScores(const std::string& path, FileFormat format, const Hierarchy& h) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open score file: " + path);
  ScoreMap s = format == FileFormat::kBinary ? ReadScores(in) : ReadScoresCsv(in, h.size());
  ValidateScores(s, h);
  return s;
}

void SaveScores(const std::string& path, FileFormat format, const ScoreMap& s) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write score file: " + path);
  format == FileFormat::kBinary ? WriteScores(out, s) : WriteScoresCsv(out, s);
  if (!out) throw FormatError("write failed: " + path);
}

LabelMap LoadLabels(const std::string& path, FileFormat format, const Hierarchy& h) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open label file: " + path);
  LabelMap labels = format == FileFormat::kBinary ? ReadLabels(in) : ReadLabelsCsv(in, h);
  labels.Validate(h);
  return labels;
}

void SaveLabels(const std::string& path, FileFormat format, const LabelMap& labels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write label file: " + path);
  format == FileFormat::kBinary ? WriteLabels(out, labels) : WriteLabelsCsv(out, labels);
  if (!out) throw FormatError("write failed: " + path);
}

}  // namespace hierlogic::io
