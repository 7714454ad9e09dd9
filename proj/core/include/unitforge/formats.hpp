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

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "unitforge/corpus.hpp"

// On-disk formats shared by every pipeline stage. All text is UTF-8 with
// '\n' line endings.
namespace unitforge {

// Unit file: one utterance per line, "<utt_id>\t<id> <id> ...".
void write_unit_file(const std::filesystem::path& file, const std::vector<FrameLabels>& utts);
std::string format_unit_file(const std::vector<FrameLabels>& utts);
// Labels are validated against vocab_size.
std::vector<FrameLabels> read_unit_file(const std::filesystem::path& file, int vocab_size);

// Vocab file: one "<id>\t<token-name>" per line, ids dense from 0.
void write_vocab_file(const std::filesystem::path& file, const std::vector<std::string>& names);
std::vector<std::string> read_vocab_file(const std::filesystem::path& file);

// Feature file: int64 T, int64 D (little-endian), then T*D little-endian
// float64 values in row-major order.
void write_feature_file(const std::filesystem::path& file, const FeatureSeq& feats);
FeatureSeq read_feature_file(const std::filesystem::path& file, double frame_rate = 50.0);

// Text corpus: one utterance per line, space-separated phone names.
void write_text_corpus(const std::filesystem::path& file, const std::vector<std::vector<int>>& seqs,
                       const PhonemeInventory& inventory);
std::vector<std::vector<int>> read_text_corpus(const std::filesystem::path& file,
                                               const PhonemeInventory& inventory);

void write_text_file(const std::filesystem::path& file, const std::string& contents);
std::string read_text_file(const std::filesystem::path& file);

}  // namespace unitforge
