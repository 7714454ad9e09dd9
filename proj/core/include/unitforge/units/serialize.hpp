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

#include "unitforge/units/bpe.hpp"
#include "unitforge/units/triphone.hpp"
#include "unitforge/units/tying.hpp"

// JSON files for the learned unit generators. Malformed files raise IoError.
namespace unitforge::units {

void save_lt_vocab(const std::filesystem::path& file, const LogicalTriphoneVocab& vocab);
LogicalTriphoneVocab load_lt_vocab(const std::filesystem::path& file);

// Nested nodes: {"question": i, "yes": {...}, "no": {...}} or {"leaf": id}.
void save_tree(const std::filesystem::path& file, const TiedStateTree& tree);
TiedStateTree load_tree(const std::filesystem::path& file);

void save_bpe(const std::filesystem::path& file, const BpeModel& bpe);
BpeModel load_bpe(const std::filesystem::path& file);

}  // namespace unitforge::units
