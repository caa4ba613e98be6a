/*
 * Copyright 2026 The SSXGB Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "ssxgb/model_io.h"

#include <fstream>

#include "ssxgb/errors.h"

namespace ssxgb {

namespace {

nlohmann::json scaled_to_json(const ScaledCiphertext& s) {
  return {{"ct", to_json(s.ct)}, {"scale", s.scale}};
}

ScaledCiphertext scaled_from_json(const nlohmann::json& j) {
  return {ciphertext_from_json(j.at("ct")), j.at("scale").get<int>()};
}

void check_version(const nlohmann::json& j) {
  if (j.value("format_version", -1) != kModelFormatVersion) {
    throw ConfigError("unsupported model format version");
  }
}

}  // namespace

nlohmann::json to_json(const TreeList& model) {
  nlohmann::json trees = nlohmann::json::array();
  for (const SecureTree& tree : model.trees) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const SecureTree::Node& n : tree.nodes) {
      nlohmann::json node = {{"leaf", n.leaf}, {"depth", n.depth}};
      if (n.leaf) {
        node["weight"] = scaled_to_json(*n.weight);
      } else {
        node["owner"] = n.owner;
        node["label"] = {n.feature, n.candidate};
        node["left"] = n.left;
        node["right"] = n.right;
      }
      nodes.push_back(std::move(node));
    }
    trees.push_back({{"nodes", std::move(nodes)}});
  }
  return {{"format_version", kModelFormatVersion},
          {"key_bits", model.key_bits},
          {"fixed_point", to_json(model.fp)},
          {"base_score", scaled_to_json(model.base_score)},
          {"trees", std::move(trees)}};
}

TreeList tree_list_from_json(const nlohmann::json& j) {
  check_version(j);
  TreeList model;
  model.key_bits = j.at("key_bits").get<unsigned>();
  model.fp = fixed_point_config_from_json(j.at("fixed_point"));
  model.base_score = scaled_from_json(j.at("base_score"));
  for (const auto& jt : j.at("trees")) {
    SecureTree tree;
    for (const auto& jn : jt.at("nodes")) {
      SecureTree::Node n;
      n.leaf = jn.at("leaf").get<bool>();
      n.depth = jn.value("depth", 0);
      if (n.leaf) {
        n.weight = scaled_from_json(jn.at("weight"));
      } else {
        n.owner = jn.at("owner").get<int>();
        n.feature = jn.at("label").at(0).get<int>();
        n.candidate = jn.at("label").at(1).get<int>();
        n.left = jn.at("left").get<int>();
        n.right = jn.at("right").get<int>();
      }
      tree.nodes.push_back(std::move(n));
    }
    model.trees.push_back(std::move(tree));
  }
  return model;
}

nlohmann::json to_json(const LookupTable& table) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& [key, e] : table) {
    entries.push_back({{"tree", key.first},
                       {"node", key.second},
                       {"feature", e.feature},
                       {"threshold", e.threshold}});
  }
  return {{"format_version", kModelFormatVersion}, {"entries", entries}};
}

LookupTable lookup_table_from_json(const nlohmann::json& j) {
  check_version(j);
  LookupTable table;
  for (const auto& e : j.at("entries")) {
    table[{e.at("tree").get<int>(), e.at("node").get<int>()}] = {
        e.at("feature").get<int>(), e.at("threshold").get<double>()};
  }
  return table;
}

nlohmann::json to_json(const PlainModel& model) {
  nlohmann::json trees = nlohmann::json::array();
  for (const PlainTree& t : model.trees) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const PlainTree::Node& n : t.nodes) {
      if (n.leaf) {
        nodes.push_back({{"leaf", true}, {"weight", n.weight}});
      } else {
        nodes.push_back({{"leaf", false},
                         {"feature", n.feature},
                         {"threshold", n.threshold},
                         {"left", n.left},
                         {"right", n.right}});
      }
    }
    trees.push_back({{"max_depth", t.max_depth}, {"nodes", nodes}});
  }
  return {{"format_version", kModelFormatVersion},
          {"base_score", model.base_score},
          {"trees", trees}};
}

PlainModel plain_model_from_json(const nlohmann::json& j) {
  check_version(j);
  PlainModel model;
  model.base_score = j.at("base_score").get<double>();
  for (const auto& jt : j.at("trees")) {
    PlainTree t;
    t.max_depth = jt.value("max_depth", 0);
    for (const auto& jn : jt.at("nodes")) {
      PlainTree::Node n;
      n.leaf = jn.at("leaf").get<bool>();
      if (n.leaf) {
        n.weight = jn.at("weight").get<double>();
      } else {
        n.feature = jn.at("feature").get<int>();
        n.threshold = jn.at("threshold").get<double>();
        n.left = jn.at("left").get<int>();
        n.right = jn.at("right").get<int>();
      }
      t.nodes.push_back(n);
    }
    model.trees.push_back(std::move(t));
  }
  return model;
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace ssxgb
