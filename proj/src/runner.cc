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

#include "ssxgb/runner.h"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>

#include "ssxgb/dataset.h"
#include "ssxgb/errors.h"
#include "ssxgb/federation.h"
#include "ssxgb/model_io.h"
#include "ssxgb/secure_prediction.h"
#include "ssxgb/secure_training.h"
#include "ssxgb/xgb_plain.h"

namespace ssxgb {

namespace fs = std::filesystem;

std::pair<PublicParams, MasterKey> generate_keys(unsigned key_bits,
                                                 uint64_t seed,
                                                 std::string cache_dir) {
  if (cache_dir.empty()) {
    if (const char* env = std::getenv("SSXGB_PARAM_CACHE")) cache_dir = env;
  }
  fs::path file;
  if (!cache_dir.empty()) {
    file = fs::path(cache_dir) / ("params_" + std::to_string(key_bits) + "_" +
                                  std::to_string(seed) + ".json");
    if (fs::exists(file)) {
      const nlohmann::json j = read_json_file(file.string());
      return {public_params_from_json(j.at("public_params")),
              master_key_from_json(j.at("master_key"))};
    }
  }
  RandomSource rng(seed, "setup/" + std::to_string(key_bits));
  auto keys = setup(key_bits / 2, rng);
  if (!file.empty()) {
    fs::create_directories(file.parent_path());
    write_json_file(file.string(), {{"public_params", to_json(keys.first)},
                                    {"master_key", to_json(keys.second)}});
  }
  return keys;
}

void write_metrics_csv(std::ostream& out,
                       const std::vector<RoundMetrics>& rows) {
  const bool both = !rows.empty() && rows.front().oracle_accuracy.has_value();
  out << "round,train_accuracy,train_logloss,wall_ms,bytes_participant_to_C,"
         "bytes_C_S";
  if (both) out << ",oracle_train_accuracy,oracle_train_logloss";
  out << '\n';
  out << std::setprecision(10);
  for (const RoundMetrics& r : rows) {
    out << r.round << ',' << r.train_accuracy << ',' << r.train_logloss << ','
        << r.wall_ms << ',' << r.bytes_participant_to_c << ',' << r.bytes_c_s;
    if (both) {
      out << ',' << r.oracle_accuracy.value_or(0.0) << ','
          << r.oracle_logloss.value_or(0.0);
    }
    out << '\n';
  }
}

namespace {

uint64_t bytes_p2c(const MessageBus& bus) {
  return bus.meter()
      .total([](const EntityId& from, const EntityId& to, const std::string&) {
        return is_participant(from) && to == kServerC;
      })
      .bytes();
}

uint64_t bytes_cs(const MessageBus& bus) {
  return bus.meter()
      .total([](const EntityId& from, const EntityId& to, const std::string&) {
        return is_server(from) && is_server(to);
      })
      .bytes();
}

PlainDataset load(const RunConfig& cfg) {
  DatasetOptions opts = cfg.dataset;
  opts.seed = cfg.seed_value();
  return load_dataset(opts);
}

void write_secure_artifacts(const fs::path& dir, Federation& fed,
                            const TreeList& model,
                            const PlainDataset& data) {
  write_json_file((dir / "model.json").string(), to_json(model));
  write_json_file((dir / "public_params.json").string(), to_json(fed.pp()));
  fs::create_directories(dir / "participants");
  for (int p = 0; p < fed.n_participants(); ++p) {
    Participant& part = fed.participant(p);
    nlohmann::json names = nlohmann::json::array();
    for (int j : part.global_ids()) names.push_back(data.feature_names[j]);
    write_json_file((dir / "participants" / (part.id() + ".json")).string(),
                    {{"keys", to_json(part.keys())},
                     {"global_ids", part.global_ids()},
                     {"feature_names", names},
                     {"is_lbp", part.is_lbp()},
                     {"lookup", to_json(part.lookup())}});
  }
  std::ofstream meter((dir / "meter.csv").string());
  fed.bus().meter().write_csv(meter);
}

}  // namespace

TrainResult run_train(const RunConfig& cfg, const RoundReporter& on_round) {
  cfg.validate();
  const uint64_t seed = cfg.seed_value();
  const PlainDataset data = load(cfg);
  const PartitionedData parts =
      partition_columns(data, cfg.n_participants, cfg.lbp);
  const fs::path dir(cfg.out_dir);
  fs::create_directories(dir);
  write_json_file((dir / "config.json").string(), to_json(cfg));
  write_json_file((dir / "features.json").string(), data.feature_names);

  TrainResult result;
  const bool want_oracle = cfg.mode != RunMode::kSecure;
  const bool want_secure = cfg.mode != RunMode::kPlaintextOracle;

  std::optional<PlainBooster> oracle;
  if (want_oracle) {
    oracle.emplace(data, parts.global[cfg.lbp], cfg.params, seed,
                   cfg.oracle_link);
  }

  if (!want_secure) {
    for (int t = 1; t <= cfg.params.rounds; ++t) {
      oracle->step();
      RoundMetrics m;
      m.round = t;
      m.train_accuracy = accuracy(data.labels, oracle->preds());
      m.train_logloss = logloss(data.labels, oracle->preds());
      result.rounds.push_back(m);
      if (on_round) on_round(m);
    }
    write_json_file((dir / "model_plain.json").string(),
                    to_json(oracle->model()));
  } else {
    const auto [pp, mk] = generate_keys(cfg.key_bits, seed);
    Federation fed(pp, mk, parts, RunContext{cfg.params, cfg.fp, seed});
    std::ofstream transcript;
    if (cfg.write_transcript) {
      transcript.open((dir / "transcript.jsonl").string());
      fed.bus().set_transcript_sink(&transcript);
    }
    uint64_t last_p2c = 0, last_cs = 0;
    auto clock = std::chrono::steady_clock::now();
    const TreeList model = ssxgb_train(fed, [&](int t, SecureTrainer& tr) {
      const auto now = std::chrono::steady_clock::now();
      RoundMetrics m;
      m.round = t;
      m.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      now - clock)
                      .count();
      std::vector<double> logits;
      for (const ScaledCiphertext& y : tr.yhat()) logits.push_back(fed.reveal(y));
      m.train_accuracy = accuracy(data.labels, logits);
      m.train_logloss = logloss(data.labels, logits);
      m.bytes_participant_to_c = bytes_p2c(fed.bus()) - last_p2c;
      m.bytes_c_s = bytes_cs(fed.bus()) - last_cs;
      last_p2c = bytes_p2c(fed.bus());
      last_cs = bytes_cs(fed.bus());
      if (oracle) {
        oracle->step();
        m.oracle_accuracy = accuracy(data.labels, oracle->preds());
        m.oracle_logloss = logloss(data.labels, oracle->preds());
      }
      result.rounds.push_back(m);
      if (on_round) on_round(m);
      clock = std::chrono::steady_clock::now();
    });
    result.transcript_hash = fed.bus().transcript_hash();
    write_secure_artifacts(dir, fed, model, data);
    write_json_file((dir / "master_key.json").string(), to_json(mk));
    std::ofstream((dir / "transcript_hash.txt").string())
        << result.transcript_hash << '\n';
    if (oracle) {
      write_json_file((dir / "model_plain.json").string(),
                      to_json(oracle->model()));
    }
  }
  std::ofstream metrics((dir / "metrics.csv").string());
  write_metrics_csv(metrics, result.rounds);
  return result;
}

std::size_t run_predict(const std::string& model_dir,
                        const std::string& records_csv,
                        const std::string& out_csv) {
  const fs::path dir(model_dir);
  const RunConfig cfg =
      run_config_from_json(read_json_file((dir / "config.json").string()));
  const std::vector<std::string> names =
      read_json_file((dir / "features.json").string())
          .get<std::vector<std::string>>();
  const std::vector<std::vector<double>> records =
      read_records(records_csv, names);
  std::vector<double> logits;

  if (fs::exists(dir / "model.json")) {
    const TreeList model =
        tree_list_from_json(read_json_file((dir / "model.json").string()));
    const PublicParams pp = public_params_from_json(
        read_json_file((dir / "public_params.json").string()));
    const MasterKey mk = master_key_from_json(
        read_json_file((dir / "master_key.json").string()));
    PartitionedData parts;
    parts.lbp = cfg.lbp;
    parts.total_features = names.size();
    std::vector<KeyPair> keys;
    std::vector<LookupTable> tables;
    for (int p = 0; p < cfg.n_participants; ++p) {
      const nlohmann::json j = read_json_file(
          (dir / "participants" / (participant_id(p) + ".json")).string());
      keys.push_back(key_pair_from_json(j.at("keys")));
      tables.push_back(lookup_table_from_json(j.at("lookup")));
      parts.global.push_back(j.at("global_ids").get<std::vector<int>>());
      parts.parts.emplace_back();
      parts.names.push_back(j.at("feature_names").get<std::vector<std::string>>());
    }
    Federation fed(pp, mk, parts,
                   RunContext{cfg.params, model.fp, cfg.seed_value()}, keys);
    for (int p = 0; p < cfg.n_participants; ++p) {
      fed.participant(p).set_lookup(tables[p]);
    }
    std::unique_ptr<Client> client = make_client(fed, "client");
    for (const std::vector<double>& rec : records) {
      client->submit(rec);
      fed.bus().run_until_idle();
      serve_prediction(fed.c(), model, client->id());
      logits.push_back(client->take_score().value());
    }
  } else if (fs::exists(dir / "model_plain.json")) {
    const PlainModel model =
        plain_model_from_json(read_json_file((dir / "model_plain.json").string()));
    Columns cols(names.size());
    for (const auto& rec : records) {
      for (std::size_t j = 0; j < rec.size(); ++j) cols[j].push_back(rec[j]);
    }
    for (std::size_t i = 0; i < records.size(); ++i) {
      logits.push_back(predict_model(model, cols, i));
    }
  } else {
    throw ConfigError(model_dir + " holds no model");
  }

  std::ofstream out(out_csv);
  if (!out) throw Error("cannot write " + out_csv);
  out << "row,logit,probability,prediction\n" << std::setprecision(10);
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out << i << ',' << logits[i] << ',' << sigmoid(logits[i]) << ','
        << (logits[i] >= 0.0 ? 1 : 0) << '\n';
  }
  return logits.size();
}

}  // namespace ssxgb
