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


#include "unitforge/units/serialize.hpp"

#include <json.hpp>

#include "unitforge/error.hpp"
#include "unitforge/formats.hpp"

namespace unitforge::units {

using nlohmann::json;

namespace {

json key_json(const TriphoneKey& k) { return json::array({k.left, k.center, k.right}); }

TriphoneKey key_from(const json& j) { return {j.at(0).get<int>(), j.at(1).get<int>(), j.at(2).get<int>()}; }

json parse_file(const std::filesystem::path& file) {
  try {
    return json::parse(read_text_file(file));
  } catch (const json::exception& ex) {
    throw IoError("malformed JSON in " + file.string() + ": " + ex.what());
  }
}

void write_json(const std::filesystem::path& file, const json& j) { write_text_file(file, j.dump(1) + "\n"); }

json node_json(const std::vector<TreeNode>& nodes, int n) {
  const TreeNode& node = nodes.at(static_cast<std::size_t>(n));
  if (node.question < 0) return {{"leaf", node.leaf_id}};
  return {{"question", node.question}, {"yes", node_json(nodes, node.yes)}, {"no", node_json(nodes, node.no)}};
}

int node_from(const json& j, std::vector<TreeNode>& nodes) {
  const int index = static_cast<int>(nodes.size());
  nodes.push_back(TreeNode{});
  if (j.contains("leaf")) {
    nodes.back().leaf_id = j.at("leaf").get<int>();
    return index;
  }
  const int question = j.at("question").get<int>();
  const int yes = node_from(j.at("yes"), nodes);
  const int no = node_from(j.at("no"), nodes);
  nodes[static_cast<std::size_t>(index)] = TreeNode{question, yes, no, -1};
  return index;
}

template <typename F>
auto guarded(const std::filesystem::path& file, F&& f) {
  try {
    return f();
  } catch (const json::exception& ex) {
    throw IoError("bad unit model " + file.string() + ": " + ex.what());
  } catch (const IoError&) {
    throw;
  } catch (const Error& ex) {
    throw IoError("bad unit model " + file.string() + ": " + ex.what());
  }
}

}  // namespace

void save_lt_vocab(const std::filesystem::path& file, const LogicalTriphoneVocab& vocab) {
  json j;
  j["type"] = "logical-triphones";
  j["base_size"] = vocab.base_size;
  j["silence_id"] = vocab.silence_id;
  j["selected"] = json::array();
  for (const auto& k : vocab.selected) j["selected"].push_back(key_json(k));
  write_json(file, j);
}

LogicalTriphoneVocab load_lt_vocab(const std::filesystem::path& file) {
  const json j = parse_file(file);
  return guarded(file, [&] {
    LogicalTriphoneVocab v;
    v.base_size = j.at("base_size").get<int>();
    v.silence_id = j.at("silence_id").get<int>();
    for (const auto& k : j.at("selected")) v.selected.push_back(key_from(k));
    v.reindex();
    return v;
  });
}

void save_tree(const std::filesystem::path& file, const TiedStateTree& tree) {
  json j;
  j["type"] = "tied-state-tree";
  j["num_phones"] = tree.num_phones;
  j["num_leaves"] = tree.num_leaves;
  j["initial_log_likelihood"] = tree.initial_log_likelihood;
  j["questions"] = json::array();
  for (const auto& q : tree.questions) {
    j["questions"].push_back(
        {{"side", q.side == Question::Side::kLeft ? "left" : "right"}, {"phones", q.phones}, {"name", q.name}});
  }
  j["trees"] = json::array();
  for (const auto& nodes : tree.trees) j["trees"].push_back(node_json(nodes, 0));
  j["splits"] = json::array();
  for (const auto& s : tree.splits) {
    j["splits"].push_back({{"center", s.center}, {"question", s.question}, {"gain", s.gain}});
  }
  write_json(file, j);
}

TiedStateTree load_tree(const std::filesystem::path& file) {
  const json j = parse_file(file);
  return guarded(file, [&] {
    TiedStateTree t;
    t.num_phones = j.at("num_phones").get<int>();
    t.num_leaves = j.at("num_leaves").get<int>();
    t.initial_log_likelihood = j.value("initial_log_likelihood", 0.0);
    for (const auto& q : j.at("questions")) {
      const std::string side = q.at("side").get<std::string>();
      if (side != "left" && side != "right") throw Error("question side must be left or right");
      t.questions.push_back({side == "left" ? Question::Side::kLeft : Question::Side::kRight,
                             q.at("phones").get<std::vector<int>>(), q.value("name", std::string())});
    }
    for (const auto& root : j.at("trees")) {
      std::vector<TreeNode> nodes;
      node_from(root, nodes);
      t.trees.push_back(std::move(nodes));
    }
    if (j.contains("splits")) {
      for (const auto& s : j.at("splits")) {
        t.splits.push_back({s.at("center").get<int>(), s.at("question").get<int>(), s.at("gain").get<double>()});
      }
    }
    t.validate();
    return t;
  });
}

void save_bpe(const std::filesystem::path& file, const BpeModel& bpe) {
  json j;
  j["type"] = "phoneme-pieces";
  j["base_size"] = bpe.base_size;
  j["silence_id"] = bpe.silence_id;
  j["merges"] = json::array();
  for (const auto& [a, b] : bpe.merges) j["merges"].push_back(json::array({a, b}));
  write_json(file, j);
}

BpeModel load_bpe(const std::filesystem::path& file) {
  const json j = parse_file(file);
  return guarded(file, [&] {
    BpeModel m;
    m.base_size = j.at("base_size").get<int>();
    m.silence_id = j.at("silence_id").get<int>();
    for (const auto& p : j.at("merges")) m.merges.emplace_back(p.at(0).get<int>(), p.at(1).get<int>());
    m.validate();
    return m;
  });
}

}  // namespace unitforge::units
