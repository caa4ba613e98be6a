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

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "json.hpp"

namespace {

namespace fs = std::filesystem;

const std::string kSource = SSXGB_SOURCE_DIR;

int run(const std::string& args) {
  const std::string cmd =
      std::string(SSXGB_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::size_t count_lines(const fs::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) n += !line.empty();
  return n;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("ssxgb_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string iris_flags(const std::string& csv = kSource + "/data/iris.csv",
                       int participants = 2) {
  return "--dataset " + csv + " --label-column species --preset iris" +
         " --participants " + std::to_string(participants) + " --seed 3";
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run("bench --reps 2"), 2);
  EXPECT_EQ(run("predict"), 2);
}

TEST(Cli, ConfigErrorsExitTwo) {
  const fs::path dir = scratch("config");
  // No seed.
  EXPECT_EQ(run("train --dataset " + kSource +
                "/data/iris.csv --label-column species --preset iris "
                "--mode plaintext-oracle --out-dir " + dir.string()),
            2);
  EXPECT_EQ(run("train " + iris_flags("/nonexistent.csv") +
                " --mode plaintext-oracle"
                " --out-dir " + dir.string()),
            2);
  EXPECT_EQ(run("train " + iris_flags() + " --mode sideways --out-dir " +
                dir.string()),
            2);
  EXPECT_EQ(run("train " + iris_flags(kSource + "/data/iris.csv", 9) +
                " --out-dir " +
                dir.string()),
            2);
  EXPECT_EQ(run("predict --model-dir " + dir.string() + " --records " +
                kSource + "/data/iris.csv --out " + (dir / "p.csv").string()),
            2);
}

TEST(Cli, OracleTrainAndPredict) {
  const fs::path dir = scratch("oracle");
  ASSERT_EQ(run("train " + iris_flags() +
                " --mode plaintext-oracle --rounds 3 --out-dir " +
                dir.string()),
            0);
  EXPECT_EQ(count_lines(dir / "metrics.csv"), 4u);
  EXPECT_TRUE(fs::exists(dir / "model_plain.json"));
  EXPECT_FALSE(fs::exists(dir / "model.json"));
  const fs::path out = dir / "pred.csv";
  ASSERT_EQ(run("predict --model-dir " + dir.string() + " --records " +
                kSource + "/data/iris.csv --out " + out.string()),
            0);
  EXPECT_EQ(count_lines(out), 151u);
}

TEST(Cli, FlagsOverrideTheConfigFile) {
  const fs::path dir = scratch("override");
  ASSERT_EQ(run("train --config " + kSource + "/configs/iris.json" +
                " --dataset " + kSource + "/data/iris.csv" +
                " --mode plaintext-oracle --rounds 2 --eta 0.5 --out-dir " +
                dir.string()),
            0);
  std::ifstream in(dir / "config.json");
  const nlohmann::json cfg = nlohmann::json::parse(in);
  EXPECT_EQ(count_lines(dir / "metrics.csv"), 3u);
  EXPECT_EQ(cfg.dump().find("\"rounds\":2") != std::string::npos, true);
  EXPECT_NE(cfg.dump().find("0.5"), std::string::npos);
}

TEST(Cli, SecureTrainAndPredict) {
  const fs::path dir = scratch("secure");
  ASSERT_EQ(run("train " + iris_flags() +
                " --mode both --rounds 2 --max-depth 2 --key-bits 512"
                " --transcript --out-dir " + dir.string()),
            0);
  for (const char* f : {"model.json", "public_params.json", "meter.csv",
                        "transcript_hash.txt", "transcript.jsonl",
                        "participants/P0.json", "participants/P1.json"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  EXPECT_EQ(count_lines(dir / "metrics.csv"), 3u);

  const fs::path records = dir / "records.csv";
  {
    std::ifstream in(kSource + "/data/iris.csv");
    std::ofstream out(records);
    std::string line;
    for (int i = 0; i < 6 && std::getline(in, line); ++i) out << line << '\n';
  }
  const fs::path out = dir / "pred.csv";
  ASSERT_EQ(run("predict --model-dir " + dir.string() + " --records " +
                records.string() + " --out " + out.string()),
            0);
  EXPECT_EQ(count_lines(out), 6u);
}

TEST(Cli, BenchWritesOneRowPerOp) {
  const fs::path dir = scratch("bench");
  ASSERT_EQ(run("bench --key-bits 256 --reps 5 --out " +
                (dir / "bench.csv").string()),
            0);
  EXPECT_EQ(count_lines(dir / "bench.csv"), 13u);
}

}  // namespace
