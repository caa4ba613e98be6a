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

#ifndef SSXGB_RUNNER_H_
#define SSXGB_RUNNER_H_

// Training and prediction runs as the CLI performs them.

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "ssxgb/bcp.h"
#include "ssxgb/run_config.h"

namespace ssxgb {

// setup() for an N of key_bits bits, seeded. When cache_dir is non-empty the
// parameters are read from / written to params_<bits>_<seed>.json there.
// An empty cache_dir falls back to $SSXGB_PARAM_CACHE if set.
std::pair<PublicParams, MasterKey> generate_keys(unsigned key_bits,
                                                 uint64_t seed,
                                                 std::string cache_dir = "");

struct RoundMetrics {
  int round = 0;
  double train_accuracy = 0.0;
  double train_logloss = 0.0;
  int64_t wall_ms = 0;
  uint64_t bytes_participant_to_c = 0;
  uint64_t bytes_c_s = 0;
  std::optional<double> oracle_accuracy;
  std::optional<double> oracle_logloss;
};

void write_metrics_csv(std::ostream& out, const std::vector<RoundMetrics>& rows);

struct TrainResult {
  std::vector<RoundMetrics> rounds;
  std::string transcript_hash;  // secure modes only
};

using RoundReporter = std::function<void(const RoundMetrics&)>;

// Runs training and writes config.json, metrics.csv and the model files into
// cfg.out_dir. `on_round` sees each round's metrics as soon as they exist.
TrainResult run_train(const RunConfig& cfg, const RoundReporter& on_round = {});

// Scores every record of `records_csv` with the model in `model_dir` and
// writes row,logit,probability,prediction to `out_csv`. Returns the row count.
std::size_t run_predict(const std::string& model_dir,
                        const std::string& records_csv,
                        const std::string& out_csv);

}  // namespace ssxgb

#endif  // SSXGB_RUNNER_H_
