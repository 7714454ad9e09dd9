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


#include "unitforge/units/tying.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "unitforge/error.hpp"

namespace unitforge::units {

void GaussStats::add(std::span<const double> x) {
  if (sum.empty()) {
    sum.assign(x.size(), 0.0);
    sum_sq.assign(x.size(), 0.0);
  }
  if (x.size() != sum.size()) throw Error("GaussStats: dimension mismatch");
  count += 1.0;
  for (std::size_t d = 0; d < x.size(); ++d) {
    sum[d] += x[d];
    sum_sq[d] += x[d] * x[d];
  }
}

void GaussStats::merge(const GaussStats& other) {
  if (other.count == 0.0) return;
  if (sum.empty()) {
    sum.assign(other.sum.size(), 0.0);
    sum_sq.assign(other.sum.size(), 0.0);
  }
  if (other.sum.size() != sum.size()) throw Error("GaussStats: dimension mismatch");
  count += other.count;
  for (std::size_t d = 0; d < sum.size(); ++d) {
    sum[d] += other.sum[d];
    sum_sq[d] += other.sum_sq[d];
  }
}

void accumulate_triphone_stats(const FeatureSeq& feats, const FrameLabels& labels, TriphoneStats& stats,
                               int silence_id) {
  validate_alignment(labels, feats);
  if (labels.ids.empty()) return;
  const RunLengthSeq runs = dedup_runs(labels.ids);
  const auto keys = runs_to_triphones(runs, silence_id);
  std::size_t t = 0;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    GaussStats& s = stats[keys[i]];
    for (int j = 0; j < runs.lengths[i]; ++j) s.add(feats.frames.row(t++));
  }
}

TriphoneStats accumulate_triphone_stats(const std::vector<FeatureSeq>& feats, const std::vector<FrameLabels>& labels,
                                        int silence_id) {
  if (feats.size() != labels.size()) throw Error("accumulate_triphone_stats: corpus sizes differ");
  TriphoneStats stats;
  for (std::size_t i = 0; i < feats.size(); ++i) accumulate_triphone_stats(feats[i], labels[i], stats, silence_id);
  return stats;
}

double gauss_log_likelihood(const GaussStats& s, double var_floor) {
  if (s.count <= 0.0) return 0.0;
  const double log2pi = std::log(2.0 * std::numbers::pi);
  double acc = 0.0;
  for (std::size_t d = 0; d < s.dim(); ++d) {
    const double mean = s.sum[d] / s.count;
    const double var = std::max(s.sum_sq[d] / s.count - mean * mean, var_floor);
    acc += std::log(var) + log2pi + 1.0;
  }
  return -0.5 * s.count * acc;
}

bool Question::ask(const TriphoneKey& key) const {
  const int phone = side == Side::kLeft ? key.left : key.right;
  return std::binary_search(phones.begin(), phones.end(), phone);
}

std::vector<Question> singleton_questions(int num_phones, const PhonemeInventory* inventory) {
  std::vector<Question> out;
  for (auto side : {Question::Side::kLeft, Question::Side::kRight}) {
    for (int p = 0; p < num_phones; ++p) {
      const std::string phone = inventory ? inventory->name_of(p) : std::to_string(p);
      out.push_back({side, {p}, std::string(side == Question::Side::kLeft ? "L=" : "R=") + phone});
    }
  }
  return out;
}

std::vector<Question> clustered_phone_questions(const TriphoneStats& stats, int num_phones) {
  std::vector<GaussStats> pooled(static_cast<std::size_t>(num_phones));
  for (const auto& [key, s] : stats) {
    if (key.center < 0 || key.center >= num_phones) throw Error("clustered_phone_questions: centre out of range");
    pooled[static_cast<std::size_t>(key.center)].merge(s);
  }
  struct Cluster {
    std::vector<int> phones;
    std::vector<double> mean;  // mean of member phone means
  };
  std::vector<Cluster> active;
  for (int p = 0; p < num_phones; ++p) {
    const GaussStats& s = pooled[static_cast<std::size_t>(p)];
    if (s.count == 0.0) continue;
    Cluster c{{p}, std::vector<double>(s.dim())};
    for (std::size_t d = 0; d < s.dim(); ++d) c.mean[d] = s.sum[d] / s.count;
    active.push_back(std::move(c));
  }
  // Ward linkage on unit-weight phone means.
  auto ward = [](const Cluster& a, const Cluster& b) {
    const double na = static_cast<double>(a.phones.size());
    const double nb = static_cast<double>(b.phones.size());
    double d2 = 0.0;
    for (std::size_t d = 0; d < a.mean.size(); ++d) d2 += (a.mean[d] - b.mean[d]) * (a.mean[d] - b.mean[d]);
    return na * nb / (na + nb) * d2;
  };
  // Every cluster of two or more phones is born in a merge, so recording
  // merges lists each once. The last two clusters stay apart.
  std::vector<std::vector<int>> sets;
  while (active.size() > 2) {
    std::size_t best_a = 0, best_b = 1;
    double best_cost = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < active.size(); ++a) {
      for (std::size_t b = a + 1; b < active.size(); ++b) {
        const double cost = ward(active[a], active[b]);
        if (cost < best_cost) {
          best_cost = cost;
          best_a = a;
          best_b = b;
        }
      }
    }
    Cluster& a = active[best_a];
    const Cluster& b = active[best_b];
    const double na = static_cast<double>(a.phones.size());
    const double nb = static_cast<double>(b.phones.size());
    for (std::size_t d = 0; d < a.mean.size(); ++d) a.mean[d] = (na * a.mean[d] + nb * b.mean[d]) / (na + nb);
    a.phones.insert(a.phones.end(), b.phones.begin(), b.phones.end());
    std::sort(a.phones.begin(), a.phones.end());
    sets.push_back(a.phones);
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(best_b));
  }
  std::vector<Question> out;
  for (auto side : {Question::Side::kLeft, Question::Side::kRight}) {
    for (std::size_t i = 0; i < sets.size(); ++i) {
      out.push_back({side, sets[i], std::string(side == Question::Side::kLeft ? "L" : "R") + "@cls" + std::to_string(i)});
    }
  }
  return out;
}

namespace {

struct Partition {
  GaussStats yes;
  GaussStats no;
  bool degenerate = false;
};

Partition partition(std::span<const Member> members, const Question& q) {
  Partition p;
  for (const auto& [key, s] : members) (q.ask(key) ? p.yes : p.no).merge(*s);
  p.degenerate = p.yes.count == 0.0 || p.no.count == 0.0;
  return p;
}

double gain_of(const Partition& p, double var_floor) {
  GaussStats all = p.yes;
  all.merge(p.no);
  return gauss_log_likelihood(p.yes, var_floor) + gauss_log_likelihood(p.no, var_floor) -
         gauss_log_likelihood(all, var_floor);
}

struct Candidate {
  int question = -1;
  double gain = -std::numeric_limits<double>::infinity();
};

struct GrowLeaf {
  int center = 0;
  int node = 0;
  std::vector<Member> members;
  Candidate best;
};

Candidate best_question(std::span<const Member> members, const std::vector<Question>& questions,
                        const TreeOptions& opts) {
  Candidate best;
  for (std::size_t qi = 0; qi < questions.size(); ++qi) {
    const Partition p = partition(members, questions[qi]);
    if (p.degenerate) continue;
    if (p.yes.count < opts.min_occupancy || p.no.count < opts.min_occupancy) continue;
    const double g = gain_of(p, opts.var_floor);
    if (g > best.gain) best = {static_cast<int>(qi), g};
  }
  return best;
}

}  // namespace

double split_gain(std::span<const Member> members, const Question& q, double var_floor) {
  const Partition p = partition(members, q);
  if (p.degenerate) throw Error("degenerate question: " + q.name);
  return gain_of(p, var_floor);
}

int TiedStateTree::route(const TriphoneKey& key) const {
  if (key.center < 0 || static_cast<std::size_t>(key.center) >= trees.size()) {
    throw Error("route: centre phone " + std::to_string(key.center) + " has no tree");
  }
  const auto& nodes = trees[static_cast<std::size_t>(key.center)];
  int n = 0;
  while (nodes[static_cast<std::size_t>(n)].question >= 0) {
    const TreeNode& node = nodes[static_cast<std::size_t>(n)];
    n = questions[static_cast<std::size_t>(node.question)].ask(key) ? node.yes : node.no;
  }
  return nodes[static_cast<std::size_t>(n)].leaf_id;
}

std::vector<double> TiedStateTree::log_likelihood_trace() const {
  std::vector<double> trace{initial_log_likelihood};
  for (const auto& s : splits) trace.push_back(trace.back() + s.gain);
  return trace;
}

void TiedStateTree::validate() const {
  if (static_cast<int>(trees.size()) != num_phones) throw Error("tied-state tree needs one tree per phone");
  std::vector<bool> seen(static_cast<std::size_t>(num_leaves), false);
  for (const auto& nodes : trees) {
    if (nodes.empty()) throw Error("tied-state tree has an empty phone tree");
    for (const auto& node : nodes) {
      if (node.question >= 0) {
        if (static_cast<std::size_t>(node.question) >= questions.size() || node.yes <= 0 || node.no <= 0 ||
            static_cast<std::size_t>(node.yes) >= nodes.size() || static_cast<std::size_t>(node.no) >= nodes.size()) {
          throw Error("tied-state tree has a malformed internal node");
        }
      } else {
        if (node.leaf_id < 0 || node.leaf_id >= num_leaves || seen[static_cast<std::size_t>(node.leaf_id)]) {
          throw Error("tied-state tree leaf ids are not dense and unique");
        }
        seen[static_cast<std::size_t>(node.leaf_id)] = true;
      }
    }
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) throw Error("tied-state tree skips a leaf id");
}

TiedStateTree grow_tying_tree(const TriphoneStats& stats, const std::vector<Question>& questions,
                              const TreeOptions& opts) {
  if (stats.empty()) throw Error("grow_tying_tree: empty statistics");
  if (opts.num_phones <= 0 || opts.max_leaves < static_cast<std::size_t>(opts.num_phones)) {
    throw Error("grow_tying_tree: leaf budget below one leaf per phone");
  }
  TiedStateTree tree;
  tree.num_phones = opts.num_phones;
  tree.questions = questions;
  tree.trees.assign(static_cast<std::size_t>(opts.num_phones), std::vector<TreeNode>{TreeNode{}});

  std::vector<GrowLeaf> leaves(static_cast<std::size_t>(opts.num_phones));
  for (int c = 0; c < opts.num_phones; ++c) leaves[static_cast<std::size_t>(c)].center = c;
  for (const auto& [key, s] : stats) {
    if (key.center < 0 || key.center >= opts.num_phones) throw Error("grow_tying_tree: centre out of range");
    leaves[static_cast<std::size_t>(key.center)].members.emplace_back(key, &s);
  }
  for (auto& leaf : leaves) {
    GaussStats pooled;
    for (const auto& m : leaf.members) pooled.merge(*m.second);
    tree.initial_log_likelihood += gauss_log_likelihood(pooled, opts.var_floor);
    leaf.best = best_question(leaf.members, questions, opts);
  }

  std::size_t count = leaves.size();
  while (count < opts.max_leaves) {
    std::size_t pick = leaves.size();
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      if (leaves[i].best.question < 0) continue;
      if (pick == leaves.size() || leaves[i].best.gain > leaves[pick].best.gain) pick = i;
    }
    if (pick == leaves.size() || !(leaves[pick].best.gain > opts.min_gain)) break;
    GrowLeaf leaf = std::move(leaves[pick]);
    const Question& q = questions[static_cast<std::size_t>(leaf.best.question)];
    auto& nodes = tree.trees[static_cast<std::size_t>(leaf.center)];
    const int yes_node = static_cast<int>(nodes.size());
    const int no_node = yes_node + 1;
    nodes[static_cast<std::size_t>(leaf.node)].question = leaf.best.question;
    nodes[static_cast<std::size_t>(leaf.node)].yes = yes_node;
    nodes[static_cast<std::size_t>(leaf.node)].no = no_node;
    nodes.push_back(TreeNode{});
    nodes.push_back(TreeNode{});
    tree.splits.push_back({leaf.center, leaf.best.question, leaf.best.gain});

    GrowLeaf yes{leaf.center, yes_node, {}, {}};
    GrowLeaf no{leaf.center, no_node, {}, {}};
    for (const auto& m : leaf.members) (q.ask(m.first) ? yes.members : no.members).push_back(m);
    yes.best = best_question(yes.members, questions, opts);
    no.best = best_question(no.members, questions, opts);
    // Children take the parent's slot and the end, keeping scan order stable.
    leaves[pick] = std::move(yes);
    leaves.push_back(std::move(no));
    ++count;
  }

  // Dense ids: phone by phone, depth-first with the "yes" branch first.
  int next = 0;
  for (auto& nodes : tree.trees) {
    std::vector<int> stack{0};
    while (!stack.empty()) {
      const int n = stack.back();
      stack.pop_back();
      TreeNode& node = nodes[static_cast<std::size_t>(n)];
      if (node.question < 0) {
        node.leaf_id = next++;
      } else {
        stack.push_back(node.no);
        stack.push_back(node.yes);
      }
    }
  }
  tree.num_leaves = next;
  tree.validate();
  return tree;
}

FrameLabels label_pt(const FrameLabels& labels, const TiedStateTree& tree, int silence_id) {
  FrameLabels out;
  out.utt_id = labels.utt_id;
  out.vocab_size = tree.num_leaves;
  if (labels.ids.empty()) return out;
  for (int id : labels.ids) {
    if (id < 0 || id >= tree.num_phones) throw Error("label_pt: base label " + std::to_string(id) + " out of range");
  }
  const RunLengthSeq runs = dedup_runs(labels.ids);
  const auto keys = runs_to_triphones(runs, silence_id);
  out.ids.reserve(labels.ids.size());
  for (std::size_t i = 0; i < keys.size(); ++i) {
    out.ids.insert(out.ids.end(), static_cast<std::size_t>(runs.lengths[i]), tree.route(keys[i]));
  }
  return out;
}

}  // namespace unitforge::units
