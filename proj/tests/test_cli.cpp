/*
 * Copyright 2026 The dramnet Authors.
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

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "dramnet/dataset_io.hpp"
#include "dramnet/pgm.hpp"
#include "support/temp_dir.hpp"

namespace dramnet {
namespace {

namespace fs = std::filesystem;
using testing::TempDir;

struct RunResult {
  int code = -1;
  std::string out;
};

// Runs the CLI with `args`, capturing stdout; stderr is discarded.
RunResult run(const TempDir& dir, const std::string& args) {
  const fs::path out = dir / "stdout.txt";
  const std::string cmd = std::string("\"") + DRAMNET_CLI + "\" " + args + " > \"" + out.string() + "\" 2>/dev/null";
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  r.out = ss.str();
  return r;
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

// One small dataset and model shared by the whole suite.
class CliPipeline : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new TempDir("dramnet-cli");
    ASSERT_EQ(run(*dir_, "gen --devices 3 --per-condition 2 --rows 64 --cols 64 --seed 5 --out " +
                             q(*dir_ / "data")).code, 0);
    ASSERT_EQ(run(*dir_, "train --data " + q(*dir_ / "data") + " --out " + q(*dir_ / "run") +
                             " --input-size 16 --epochs 1 --batch-size 8").code, 0);
  }
  static void TearDownTestSuite() {
    delete dir_;
    dir_ = nullptr;
  }
  static TempDir* dir_;
};

TempDir* CliPipeline::dir_ = nullptr;

TEST_F(CliPipeline, GenWritesEveryMeasurement) {
  const auto m = io::read_manifest(*dir_ / "data");
  EXPECT_EQ(m.records.size(), 36u);
  for (const auto& r : m.records) EXPECT_TRUE(fs::exists(*dir_ / "data" / r.file)) << r.file;
  EXPECT_TRUE(fs::exists(*dir_ / "data" / "gen.run.json"));
}

TEST_F(CliPipeline, GenIsReproducible) {
  TempDir other;
  ASSERT_EQ(run(other, "gen --devices 3 --per-condition 2 --rows 64 --cols 64 --seed 5 --out " +
                           q(other / "data")).code, 0);
  for (const auto& entry : fs::directory_iterator(*dir_ / "data")) {
    const auto name = entry.path().filename();
    EXPECT_EQ(read_text(entry.path()), read_text(other / "data" / name.string())) << name;
  }
}

TEST_F(CliPipeline, TrainWritesArtifacts) {
  for (const char* f : {"model.drnw", "history.csv", "train.run.json"})
    EXPECT_TRUE(fs::exists(*dir_ / "run" / f)) << f;
  const auto manifest = nlohmann::json::parse(read_text(*dir_ / "run" / "train.run.json"));
  EXPECT_EQ(manifest["command"], "train");
}

TEST_F(CliPipeline, EvalWritesMetrics) {
  TempDir out;
  const auto r = run(out, "eval --data " + q(*dir_ / "data") + " --model " + q(*dir_ / "run" / "model.drnw") +
                              " --out " + q(out / "ev"));
  ASSERT_EQ(r.code, 0);
  const auto metrics = nlohmann::json::parse(read_text(out / "ev" / "metrics.json"));
  EXPECT_EQ(metrics["total"], 15);  // 12 per device, 7 trained on
  EXPECT_TRUE(fs::exists(out / "ev" / "roc.csv"));
  EXPECT_TRUE(fs::exists(out / "ev" / "confusion.csv"));
}

TEST_F(CliPipeline, EvalRefusesDifferentSplit) {
  TempDir out;
  const std::string base = "eval --data " + q(*dir_ / "data") + " --model " +
                           q(*dir_ / "run" / "model.drnw") + " --out " + q(out / "ev") + " --split-seed 9";
  EXPECT_EQ(run(out, base).code, 5);
  EXPECT_EQ(run(out, base + " --force").code, 0);
}

TEST_F(CliPipeline, AuthThresholdZeroAccepts) {
  const auto r = run(*dir_, "auth --model " + q(*dir_ / "run" / "model.drnw") + " --measurement " +
                                q(*dir_ / "data" / "m_00000.bin") + " --threshold 0");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(nlohmann::json::parse(r.out)["accepted"], true);
}

TEST_F(CliPipeline, AuthRejectsIndivisibleMeasurement) {
  TempDir other;
  ASSERT_EQ(run(other, "gen --devices 1 --conditions nominal --per-condition 1 --rows 24 --cols 24 --out " +
                           q(other / "d")).code, 0);
  EXPECT_EQ(run(other, "auth --model " + q(*dir_ / "run" / "model.drnw") + " --measurement " +
                           q(other / "d" / "m_00000.bin")).code, 2);
}

TEST_F(CliPipeline, AuthThresholdOutOfRange) {
  EXPECT_EQ(run(*dir_, "auth --model " + q(*dir_ / "run" / "model.drnw") + " --measurement " +
                           q(*dir_ / "data" / "m_00000.bin") + " --threshold 1.5").code, 2);
}

TEST_F(CliPipeline, ExportImageRoundTrip) {
  TempDir out;
  ASSERT_EQ(run(out, "export-image " + q(*dir_ / "data" / "m_00003.bin") + " " + q(out / "a.pgm") + " --size 16")
                .code, 0);
  const auto img = imaging::import_pgm(out / "a.pgm");
  EXPECT_EQ(img.rows, 16u);
  EXPECT_EQ(img.cols, 16u);
  EXPECT_TRUE(fs::exists(out / "a.pgm.run.json"));
}

TEST(Cli, ShapesPrintsInferredRows) {
  TempDir out;
  const auto r = run(out, "shapes");
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("512 x 512 x 128"), std::string::npos);
  EXPECT_NE(r.out.find("Layer5"), std::string::npos);
  const auto j = run(out, "shapes --input 64 --json");
  ASSERT_EQ(j.code, 0);
  EXPECT_EQ(nlohmann::json::parse(j.out)["input"], "64 x 64 x 1");
}

TEST(Cli, UsageErrors) {
  TempDir out;
  EXPECT_EQ(run(out, "").code, 2);
  EXPECT_EQ(run(out, "gen --bogus 1 --out x").code, 2);
  EXPECT_EQ(run(out, "gen --conditions sunny --out " + q(out / "d")).code, 2);
  EXPECT_EQ(run(out, "shapes --input 4").code, 2);
}

TEST(Cli, MissingFilesAreIoErrors) {
  TempDir out;
  EXPECT_EQ(run(out, "export-image " + q(out / "nope.bin") + " " + q(out / "a.pgm")).code, 3);
  EXPECT_EQ(run(out, "train --data " + q(out / "nope") + " --out " + q(out / "r")).code, 3);
}

TEST(Cli, Version) {
  TempDir out;
  const auto r = run(out, "--version");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("0.1.0"), std::string::npos);
}

}  // namespace
}  // namespace dramnet
