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

#include "ssxgb/run_config.h"

#include <set>

#include "ssxgb/errors.h"

namespace ssxgb {

std::string to_string(RunMode mode) {
  switch (mode) {
    case RunMode::kSecure:
      return "secure";
    case RunMode::kPlaintextOracle:
      return "plaintext-oracle";
    case RunMode::kBoth:
      return "both";
  }
  return "secure";
}

RunMode run_mode_from_string(const std::string& s) {
  if (s == "secure") return RunMode::kSecure;
  if (s == "plaintext-oracle") return RunMode::kPlaintextOracle;
  if (s == "both") return RunMode::kBoth;
  throw ConfigError("mode must be secure, plaintext-oracle or both (got '" +
                    s + "')");
}

void RunConfig::validate() const {
  if (!seed) throw ConfigError("a seed is required");
  if (dataset.path.empty()) throw ConfigError("a dataset path is required");
  if (n_participants < 1) throw ConfigError("participants must be >= 1");
  if (lbp < 0 || lbp >= n_participants) {
    throw ConfigError("lbp must index one of the participants");
  }
  if (key_bits < 64 || key_bits % 2 != 0) {
    throw ConfigError("key_bits must be an even number >= 64");
  }
  params.validate();
}

uint64_t RunConfig::seed_value() const {
  if (!seed) throw ConfigError("a seed is required");
  return *seed;
}

nlohmann::json to_json(const RunConfig& cfg) {
  nlohmann::json j = {
      {"dataset", cfg.dataset.path},
      {"label_column", cfg.dataset.label_column},
      {"preset", cfg.dataset.preset},
      {"max_rows", cfg.dataset.max_rows},
      {"max_features", cfg.dataset.max_features},
      {"participants", cfg.n_participants},
      {"lbp", cfg.lbp},
      {"key_bits", cfg.key_bits},
      {"fixed_point", to_json(cfg.fp)},
      {"eta", cfg.params.eta},
      {"lambda", cfg.params.lambda},
      {"gamma", cfg.params.gamma},
      {"max_depth", cfg.params.max_depth},
      {"rounds", cfg.params.rounds},
      {"subsample_rows", cfg.params.subsample_rows},
      {"subsample_cols", cfg.params.subsample_cols},
      {"bucket_size", cfg.params.bucket_size},
      {"n_candidates", cfg.params.n_candidates},
      {"mode", to_string(cfg.mode)},
      {"oracle_link", cfg.oracle_link == Link::kExact ? "exact" : "cubic"},
      {"out_dir", cfg.out_dir},
      {"write_transcript", cfg.write_transcript},
  };
  if (cfg.seed) j["seed"] = *cfg.seed;
  return j;
}

RunConfig run_config_from_json(const nlohmann::json& j) {
  static const std::set<std::string> known = {
      "dataset",        "label_column", "preset",        "max_rows",
      "max_features",   "participants", "lbp",           "key_bits",
      "fixed_point",    "eta",          "lambda",        "gamma",
      "max_depth",      "rounds",       "subsample_rows", "subsample_cols",
      "bucket_size",    "n_candidates", "seed",          "mode",
      "oracle_link",    "out_dir",      "write_transcript"};
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (known.count(key) == 0) throw ConfigError("unknown config key " + key);
  }
  RunConfig cfg;
  try {
    cfg.dataset.path = j.value("dataset", cfg.dataset.path);
    cfg.dataset.label_column = j.value("label_column", cfg.dataset.label_column);
    cfg.dataset.preset = j.value("preset", cfg.dataset.preset);
    cfg.dataset.max_rows = j.value("max_rows", cfg.dataset.max_rows);
    cfg.dataset.max_features = j.value("max_features", cfg.dataset.max_features);
    cfg.n_participants = j.value("participants", cfg.n_participants);
    cfg.lbp = j.value("lbp", cfg.lbp);
    cfg.key_bits = j.value("key_bits", cfg.key_bits);
    if (j.contains("fixed_point")) {
      cfg.fp = fixed_point_config_from_json(j.at("fixed_point"));
    }
    cfg.params.eta = j.value("eta", cfg.params.eta);
    cfg.params.lambda = j.value("lambda", cfg.params.lambda);
    cfg.params.gamma = j.value("gamma", cfg.params.gamma);
    cfg.params.max_depth = j.value("max_depth", cfg.params.max_depth);
    cfg.params.rounds = j.value("rounds", cfg.params.rounds);
    cfg.params.subsample_rows =
        j.value("subsample_rows", cfg.params.subsample_rows);
    cfg.params.subsample_cols =
        j.value("subsample_cols", cfg.params.subsample_cols);
    cfg.params.bucket_size = j.value("bucket_size", cfg.params.bucket_size);
    cfg.params.n_candidates = j.value("n_candidates", cfg.params.n_candidates);
    if (j.contains("seed")) cfg.seed = j.at("seed").get<uint64_t>();
    if (j.contains("mode")) {
      cfg.mode = run_mode_from_string(j.at("mode").get<std::string>());
    }
    if (j.contains("oracle_link")) {
      const std::string l = j.at("oracle_link").get<std::string>();
      if (l == "exact") {
        cfg.oracle_link = Link::kExact;
      } else if (l == "cubic") {
        cfg.oracle_link = Link::kCubic;
      } else {
        throw ConfigError("oracle_link must be exact or cubic");
      }
    }
    cfg.out_dir = j.value("out_dir", cfg.out_dir);
    cfg.write_transcript = j.value("write_transcript", cfg.write_transcript);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

}  // namespace ssxgb
