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

#ifndef SSXGB_RUN_CONFIG_H_
#define SSXGB_RUN_CONFIG_H_

#include <cstdint>
#include <optional>
#include <string>

#include "json.hpp"
#include "ssxgb/dataset.h"
#include "ssxgb/encoding.h"
#include "ssxgb/xgb_plain.h"

namespace ssxgb {

enum class RunMode { kSecure, kPlaintextOracle, kBoth };

std::string to_string(RunMode mode);
RunMode run_mode_from_string(const std::string& s);

struct RunConfig {
  DatasetOptions dataset;
  int n_participants = 4;
  int lbp = 0;
  unsigned key_bits = 1024;  // bit length of N
  FixedPointConfig fp;
  BoostParams params;
  std::optional<uint64_t> seed;
  RunMode mode = RunMode::kSecure;
  Link oracle_link = Link::kExact;
  std::string out_dir = "out";
  bool write_transcript = false;

  // Throws ConfigError: missing seed, bad ranges, too many participants is
  // checked once the data is loaded.
  void validate() const;
  uint64_t seed_value() const;
};

nlohmann::json to_json(const RunConfig& cfg);
// Unknown keys are rejected.
RunConfig run_config_from_json(const nlohmann::json& j);

}  // namespace ssxgb

#endif  // SSXGB_RUN_CONFIG_H_
