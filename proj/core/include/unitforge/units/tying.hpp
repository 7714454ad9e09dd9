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

#include <cstddef>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "unitforge/corpus.hpp"
#include "unitforge/units/triphone.hpp"

// Decision-tree state tying over single diagonal-Gaussian triphone statistics.
namespace unitforge::units {

struct GaussStats {
  double count = 0.0;
  std::vector<double> sum;
  std::vector<double> sum_sq;

  void add(std::span<const double> x);
  void merge(const GaussStats& other);
  std::size_t dim() const { return sum.size(); }
};

using TriphoneStats = std::map<TriphoneKey, GaussStats>;

// Every frame goes to the triphone of its run.
void accumulate_triphone_stats(const FeatureSeq& feats, const FrameLabels& labels, TriphoneStats& stats,
                               int silence_id = 0);
TriphoneStats accumulate_triphone_stats(const std::vector<FeatureSeq>& feats, const std::vector<FrameLabels>& labels,
                                        int silence_id = 0);

// -(n/2) * sum_d (log var_d + log 2pi + 1), var floored.
double gauss_log_likelihood(const GaussStats& s, double var_floor = 1e-6);

struct Question {
  enum class Side { kLeft, kRight };
  Side side = Side::kLeft;
  std::vector<int> phones;  // sorted
  std::string name;

  bool ask(const TriphoneKey& key) const;
};

// {p} against each side, for every phone.
std::vector<Question> singleton_questions(int num_phones, const PhonemeInventory* inventory = nullptr);
// Phone sets from Ward clustering of per-phone mean vectors (pooled over
// contexts); every proper cluster of two or more phones is asked on both sides.
std::vector<Question> clustered_phone_questions(const TriphoneStats& stats, int num_phones);

using Member = std::pair<TriphoneKey, const GaussStats*>;

// L(yes) + L(no) - L(all). Throws "degenerate question" when a side is empty.
double split_gain(std::span<const Member> members, const Question& q, double var_floor = 1e-6);

struct TreeNode {
  int question = -1;  // index into the tree's question list; -1 for leaves
  int yes = -1;
  int no = -1;
  int leaf_id = -1;
};

struct SplitRecord {
  int center = 0;
  int question = 0;
  double gain = 0.0;
};

struct TiedStateTree {
  int num_phones = 40;
  std::vector<Question> questions;
  std::vector<std::vector<TreeNode>> trees;  // one per centre phone; node 0 is the root
  int num_leaves = 0;
  double initial_log_likelihood = 0.0;
  std::vector<SplitRecord> splits;  // in growth order

  int route(const TriphoneKey& key) const;
  // initial_log_likelihood followed by the running total after each split.
  std::vector<double> log_likelihood_trace() const;
  void validate() const;
};

struct TreeOptions {
  std::size_t max_leaves = 500;
  double min_gain = 0.0;        // a split must gain strictly more
  double min_occupancy = 0.0;   // frames required on each side
  double var_floor = 1e-6;
  int num_phones = 40;
};

TiedStateTree grow_tying_tree(const TriphoneStats& stats, const std::vector<Question>& questions,
                              const TreeOptions& opts);

FrameLabels label_pt(const FrameLabels& labels, const TiedStateTree& tree, int silence_id = 0);

}  // namespace unitforge::units
