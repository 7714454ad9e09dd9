// Copyright 2026 The unitforge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "unitforge/formats.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "unitforge/error.hpp"

namespace unitforge {
namespace {

std::ofstream open_out(const std::filesystem::path& file, bool binary) {
  std::ofstream out(file, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
  if (!out) throw IoError("cannot write " + file.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& file, bool binary) {
  std::ifstream in(file, binary ? std::ios::binary : std::ios::in);
  if (!in) throw IoError("cannot read " + file.string());
  return in;
}

int parse_int(std::string_view s, const std::filesystem::path& file, std::size_t line) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw IoError(file.string() + ":" + std::to_string(line) + ": bad integer '" +
                  std::string(s) + "'");
  }
  return v;
}

}  // namespace

std::string format_unit_file(const std::vector<FrameLabels>& utts) {
  std::string out;
  for (const FrameLabels& u : utts) {
    if (u.utt_id.find_first_of("\t\n") != std::string::npos) {
      throw Error("utterance id contains tab or newline: " + u.utt_id);
    }
    out += u.utt_id;
    out += '\t';
    for (std::size_t i = 0; i < u.ids.size(); ++i) {
      if (i) out += ' ';
      out += std::to_string(u.ids[i]);
    }
    out += '\n';
  }
  return out;
}

void write_unit_file(const std::filesystem::path& file, const std::vector<FrameLabels>& utts) {
  write_text_file(file, format_unit_file(utts));
}

std::vector<FrameLabels> read_unit_file(const std::filesystem::path& file, int vocab_size) {
  std::ifstream in = open_in(file, false);
  std::vector<FrameLabels> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw IoError(file.string() + ":" + std::to_string(lineno) + ": missing tab separator");
    }
    FrameLabels u;
    u.utt_id = line.substr(0, tab);
    u.vocab_size = vocab_size;
    std::string_view rest(line);
    rest.remove_prefix(tab + 1);
    while (!rest.empty()) {
      const auto sp = rest.find(' ');
      const std::string_view tok = rest.substr(0, sp);
      u.ids.push_back(parse_int(tok, file, lineno));
      if (sp == std::string_view::npos) break;
      rest.remove_prefix(sp + 1);
    }
    try {
      u.validate();
    } catch (const Error& ex) {
      throw IoError(file.string() + ":" + std::to_string(lineno) + ": " + ex.what());
    }
    out.push_back(std::move(u));
  }
  return out;
}

void write_vocab_file(const std::filesystem::path& file, const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    out += std::to_string(i);
    out += '\t';
    out += names[i];
    out += '\n';
  }
  write_text_file(file, out);
}

std::vector<std::string> read_vocab_file(const std::filesystem::path& file) {
  std::ifstream in = open_in(file, false);
  std::vector<std::string> names;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw IoError(file.string() + ":" + std::to_string(lineno) + ": missing tab separator");
    }
    const int id = parse_int(std::string_view(line).substr(0, tab), file, lineno);
    if (id != static_cast<int>(names.size())) {
      throw IoError(file.string() + ":" + std::to_string(lineno) + ": ids must be dense from 0");
    }
    names.push_back(line.substr(tab + 1));
  }
  return names;
}

void write_feature_file(const std::filesystem::path& file, const FeatureSeq& feats) {
  static_assert(std::endian::native == std::endian::little);
  std::ofstream out = open_out(file, true);
  const std::int64_t header[2] = {static_cast<std::int64_t>(feats.num_frames()),
                                  static_cast<std::int64_t>(feats.dim())};
  out.write(reinterpret_cast<const char*>(header), sizeof(header));
  out.write(reinterpret_cast<const char*>(feats.frames.data().data()),
            static_cast<std::streamsize>(feats.frames.size() * sizeof(double)));
  if (!out) throw IoError("write failed: " + file.string());
}

FeatureSeq read_feature_file(const std::filesystem::path& file, double frame_rate) {
  std::ifstream in = open_in(file, true);
  std::int64_t header[2] = {0, 0};
  in.read(reinterpret_cast<char*>(header), sizeof(header));
  if (!in || header[0] <= 0 || header[1] <= 0) {
    throw IoError("bad feature header in " + file.string());
  }
  const auto t = static_cast<std::size_t>(header[0]);
  const auto d = static_cast<std::size_t>(header[1]);
  std::vector<double> data(t * d);
  in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size() * sizeof(double)));
  if (!in) throw IoError("truncated feature file " + file.string());
  if (in.peek() != std::char_traits<char>::eof()) {
    throw IoError("trailing bytes in feature file " + file.string());
  }
  return FeatureSeq(nk::Tensor({t, d}, std::move(data)), frame_rate);
}

void write_text_corpus(const std::filesystem::path& file, const std::vector<std::vector<int>>& seqs,
                       const PhonemeInventory& inventory) {
  std::string out;
  for (const auto& seq : seqs) {
    for (std::size_t i = 0; i < seq.size(); ++i) {
      if (i) out += ' ';
      out += inventory.name_of(seq[i]);
    }
    out += '\n';
  }
  write_text_file(file, out);
}

std::vector<std::vector<int>> read_text_corpus(const std::filesystem::path& file,
                                               const PhonemeInventory& inventory) {
  std::ifstream in = open_in(file, false);
  std::vector<std::vector<int>> out;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::vector<int> seq;
    std::string tok;
    while (ss >> tok) seq.push_back(inventory.id_of(tok));
    if (!seq.empty()) out.push_back(std::move(seq));
  }
  return out;
}

void write_text_file(const std::filesystem::path& file, const std::string& contents) {
  std::ofstream out = open_out(file, true);
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IoError("write failed: " + file.string());
}

std::string read_text_file(const std::filesystem::path& file) {
  std::ifstream in = open_in(file, true);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace unitforge
