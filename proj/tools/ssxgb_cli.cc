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

// ssxgb: train, predict and bench subcommands.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ssxgb/bench.h"
#include "ssxgb/errors.h"
#include "ssxgb/model_io.h"
#include "ssxgb/run_config.h"
#include "ssxgb/runner.h"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitFailure = 3;

struct TrainFlags {
  std::string config;
  std::optional<std::string> dataset, label_column, preset, mode, out_dir,
      oracle_link;
  std::optional<int> participants, lbp, rounds, max_depth, bucket_size,
      n_candidates, max_rows, max_features, f, f_q;
  std::optional<unsigned> key_bits;
  std::optional<uint64_t> seed;
  std::optional<double> eta, lambda, gamma, subsample_rows, subsample_cols;
  bool transcript = false;
};

template <typename T>
void set_if(const std::optional<T>& flag, T& field) {
  if (flag) field = *flag;
}

ssxgb::RunConfig build_config(const TrainFlags& fl) {
  ssxgb::RunConfig cfg;
  if (!fl.config.empty()) {
    cfg = ssxgb::run_config_from_json(ssxgb::read_json_file(fl.config));
  }
  set_if(fl.dataset, cfg.dataset.path);
  set_if(fl.label_column, cfg.dataset.label_column);
  set_if(fl.preset, cfg.dataset.preset);
  set_if(fl.max_rows, cfg.dataset.max_rows);
  set_if(fl.max_features, cfg.dataset.max_features);
  set_if(fl.participants, cfg.n_participants);
  set_if(fl.lbp, cfg.lbp);
  set_if(fl.key_bits, cfg.key_bits);
  set_if(fl.f, cfg.fp.scale_exp);
  set_if(fl.f_q, cfg.fp.quotient_scale_exp);
  set_if(fl.eta, cfg.params.eta);
  set_if(fl.lambda, cfg.params.lambda);
  set_if(fl.gamma, cfg.params.gamma);
  set_if(fl.max_depth, cfg.params.max_depth);
  set_if(fl.rounds, cfg.params.rounds);
  set_if(fl.subsample_rows, cfg.params.subsample_rows);
  set_if(fl.subsample_cols, cfg.params.subsample_cols);
  set_if(fl.bucket_size, cfg.params.bucket_size);
  set_if(fl.n_candidates, cfg.params.n_candidates);
  set_if(fl.out_dir, cfg.out_dir);
  if (fl.seed) cfg.seed = fl.seed;
  if (fl.mode) cfg.mode = ssxgb::run_mode_from_string(*fl.mode);
  if (fl.oracle_link) {
    if (*fl.oracle_link == "exact") {
      cfg.oracle_link = ssxgb::Link::kExact;
    } else if (*fl.oracle_link == "cubic") {
      cfg.oracle_link = ssxgb::Link::kCubic;
    } else {
      throw ssxgb::ConfigError("--oracle-link must be exact or cubic");
    }
  }
  if (fl.transcript) cfg.write_transcript = true;
  return cfg;
}

int train(const TrainFlags& fl) {
  const ssxgb::RunConfig cfg = build_config(fl);
  const ssxgb::TrainResult res =
      ssxgb::run_train(cfg, [](const ssxgb::RoundMetrics& m) {
        std::cout << "round " << m.round << " acc " << m.train_accuracy
                  << " logloss " << m.train_logloss;
        if (m.oracle_accuracy) std::cout << " oracle_acc " << *m.oracle_accuracy;
        if (m.wall_ms > 0) std::cout << " ms " << m.wall_ms;
        std::cout << std::endl;
      });
  if (!res.transcript_hash.empty()) {
    std::cout << "transcript " << res.transcript_hash << '\n';
  }
  std::cout << "wrote " << cfg.out_dir << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Secure multi-party XGBoost over vertically partitioned data"};
  app.require_subcommand(1);

  TrainFlags tf;
  CLI::App* train_cmd = app.add_subcommand("train", "train a model");
  train_cmd->add_option("--config", tf.config, "run config JSON");
  train_cmd->add_option("--dataset", tf.dataset, "CSV path");
  train_cmd->add_option("--label-column", tf.label_column);
  train_cmd->add_option("--preset", tf.preset, "iris or mnist");
  train_cmd->add_option("--max-rows", tf.max_rows, "balanced row subsample");
  train_cmd->add_option("--max-features", tf.max_features,
                        "keep the highest-variance columns");
  train_cmd->add_option("--participants", tf.participants);
  train_cmd->add_option("--lbp", tf.lbp, "index of the label holder");
  train_cmd->add_option("--key-bits", tf.key_bits, "bit length of N");
  train_cmd->add_option("--f", tf.f, "fractional bits");
  train_cmd->add_option("--f-q", tf.f_q, "fractional bits of quotients");
  train_cmd->add_option("--eta", tf.eta);
  train_cmd->add_option("--lambda", tf.lambda);
  train_cmd->add_option("--gamma", tf.gamma);
  train_cmd->add_option("--max-depth", tf.max_depth);
  train_cmd->add_option("--rounds", tf.rounds);
  train_cmd->add_option("--subsample-rows", tf.subsample_rows);
  train_cmd->add_option("--subsample-cols", tf.subsample_cols);
  train_cmd->add_option("--bucket-size", tf.bucket_size);
  train_cmd->add_option("--candidates", tf.n_candidates,
                        "candidates per feature when bucket size is 0");
  train_cmd->add_option("--seed", tf.seed);
  train_cmd->add_option("--mode", tf.mode, "secure, plaintext-oracle or both");
  train_cmd->add_option("--oracle-link", tf.oracle_link, "exact or cubic");
  train_cmd->add_option("--out-dir", tf.out_dir);
  train_cmd->add_flag("--transcript", tf.transcript,
                      "write transcript.jsonl");

  std::string model_dir, records, predictions = "predictions.csv";
  CLI::App* predict_cmd = app.add_subcommand("predict", "score records");
  predict_cmd->add_option("--model-dir", model_dir)->required();
  predict_cmd->add_option("--records", records, "CSV with feature columns")
      ->required();
  predict_cmd->add_option("--out", predictions);

  std::vector<unsigned> bench_bits = {512, 1024, 2048};
  int reps = 20;
  uint64_t bench_seed = 1;
  std::string bench_out = "bench.csv", cache_dir;
  CLI::App* bench_cmd = app.add_subcommand("bench", "time the primitives");
  bench_cmd->add_option("--key-bits", bench_bits, "bit lengths of N");
  bench_cmd->add_option("--reps", reps)->check(CLI::Range(5, 100000));
  bench_cmd->add_option("--seed", bench_seed);
  bench_cmd->add_option("--out", bench_out);
  bench_cmd->add_option("--cache-dir", cache_dir, "parameter cache");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*train_cmd) return train(tf);
    if (*predict_cmd) {
      const std::size_t n = ssxgb::run_predict(model_dir, records, predictions);
      std::cout << "scored " << n << " records into " << predictions << '\n';
      return 0;
    }
    if (*bench_cmd) {
      const auto rows =
          ssxgb::bench_primitives(bench_bits, reps, bench_seed, cache_dir);
      std::ofstream out(bench_out);
      ssxgb::write_bench_csv(out, rows);
      ssxgb::write_bench_csv(std::cout, rows);
      return 0;
    }
  } catch (const ssxgb::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return 0;
}
