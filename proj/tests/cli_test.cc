// Copyright 2026 The scade Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>

#include "json.hpp"
#include "test_util.h"

namespace scade {
namespace {

namespace fs = std::filesystem;
using testing::ReadFile;
using testing::TempDir;
using testing::WriteFile;

struct Outcome {
  int exit_code = -1;
  std::string out;
};

// Runs the scade binary with `args`; stdout is captured, stderr discarded.
Outcome Scade(const std::string& args) {
  const std::string command = std::string(SCADE_BINARY) + " " + args + " 2>/dev/null";
  Outcome result;
  FILE* pipe = popen(command.c_str(), "r");
  if (pipe == nullptr) return result;
  char buffer[4096];
  for (std::size_t n; (n = fread(buffer, 1, sizeof buffer, pipe)) > 0;) {
    result.out.append(buffer, n);
  }
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::string Quote(const fs::path& p) { return "'" + p.string() + "'"; }

TEST(CliTest, UsageErrorsExitWithConfigCode) {
  EXPECT_EQ(Scade("").exit_code, 2);
  EXPECT_EQ(Scade("detect").exit_code, 2);  // no input
  EXPECT_EQ(Scade("detect --input /no/such/file.jsonl").exit_code, 2);
  EXPECT_EQ(Scade("detect --bogus-flag").exit_code, 2);
  EXPECT_EQ(Scade("evaluate --verdicts x.jsonl").exit_code, 2);
  EXPECT_EQ(Scade("--help").exit_code, 0);
}

TEST(CliTest, DryRunPrintsResolvedConfig) {
  TempDir dir;
  WriteFile(dir / "events.jsonl", "this file is never parsed\n");
  WriteFile(dir / "run.ini", "[scoring]\nk = 1.2\n[threshold]\nwindow_days = 3\n");
  const auto r = Scade("detect --dry-run -c " + Quote(dir / "run.ini") + " --input " +
                       Quote(dir / "events.jsonl") + " --window-days 4 --out " +
                       Quote(dir / "out"));
  ASSERT_EQ(r.exit_code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("scoring").at("k").get<double>(), 1.2);
  EXPECT_EQ(j.at("threshold").at("window_days").get<int>(), 4);
  EXPECT_FALSE(fs::exists(dir / "out"));
}

TEST(CliTest, EnvironmentOverridesFile) {
  TempDir dir;
  WriteFile(dir / "events.jsonl", "{}\n");
  WriteFile(dir / "run.ini", "[scoring]\nb = 0.2\n");
  const auto r = Scade("detect --dry-run -c " + Quote(dir / "run.ini") + " -i " +
                       Quote(dir / "events.jsonl"));
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_EQ(nlohmann::json::parse(r.out).at("scoring").at("b").get<double>(), 0.2);
  ::setenv("SCADE_SCORING_B", "0.6", 1);
  const auto overridden = Scade("detect --dry-run -c " + Quote(dir / "run.ini") + " -i " +
                                Quote(dir / "events.jsonl"));
  ::unsetenv("SCADE_SCORING_B");
  ASSERT_EQ(overridden.exit_code, 0);
  EXPECT_EQ(nlohmann::json::parse(overridden.out).at("scoring").at("b").get<double>(), 0.6);
}

TEST(CliTest, InvalidSettingValue) {
  TempDir dir;
  WriteFile(dir / "events.jsonl", "{}\n");
  EXPECT_EQ(Scade("detect --dry-run -i " + Quote(dir / "events.jsonl") + " --b 3").exit_code,
            2);
  EXPECT_EQ(Scade("detect --dry-run -i " + Quote(dir / "events.jsonl") +
                  " --gram-modes trigram")
                .exit_code,
            2);
}

TEST(CliTest, MalformedInputIsDataError) {
  TempDir dir;
  WriteFile(dir / "events.jsonl", "garbage\nmore garbage\n");
  EXPECT_EQ(
      Scade("detect -i " + Quote(dir / "events.jsonl") + " -o " + Quote(dir / "out")).exit_code,
      3);
}

TEST(CliTest, SimulateDetectEvaluate) {
  TempDir dir;
  const fs::path scenario = fs::path(SCADE_TEST_DATA_DIR) / "small_scenario.json";
  auto r = Scade("simulate --scenario " + Quote(scenario) + " --out " + Quote(dir / "sim"));
  ASSERT_EQ(r.exit_code, 0);
  ASSERT_TRUE(fs::exists(dir / "sim" / "events.jsonl"));
  ASSERT_TRUE(fs::exists(dir / "sim" / "truth.jsonl"));

  r = Scade("detect -i " + Quote(dir / "sim" / "events.jsonl") + " -o " + Quote(dir / "run") +
            " --trees 50 --truth " + Quote(dir / "sim" / "truth.jsonl"));
  ASSERT_EQ(r.exit_code, 0);
  const auto summary = nlohmann::json::parse(r.out);
  EXPECT_GT(summary.at("classified").get<int>(), 0);
  EXPECT_EQ(ReadFile(dir / "run" / "verdicts.jsonl"),
            ReadFile(fs::path(SCADE_TEST_DATA_DIR) / "golden_verdicts.jsonl"));

  r = Scade("evaluate --verdicts " + Quote(dir / "run" / "verdicts.jsonl") + " --truth " +
            Quote(dir / "sim" / "truth.jsonl") + " -o " + Quote(dir / "metrics.json"));
  ASSERT_EQ(r.exit_code, 0);
  const auto metrics = nlohmann::json::parse(ReadFile(dir / "metrics.json"));
  EXPECT_EQ(metrics, nlohmann::json::parse(r.out));
  EXPECT_EQ(metrics, summary.at("metrics"));
}

TEST(CliTest, StagesRunAsSeparateProcesses) {
  TempDir dir;
  const fs::path scenario = fs::path(SCADE_TEST_DATA_DIR) / "small_scenario.json";
  ASSERT_EQ(Scade("simulate --scenario " + Quote(scenario) + " -o " + Quote(dir / "sim"))
                .exit_code,
            0);
  const std::string out = " -o " + Quote(dir / "run");
  EXPECT_EQ(Scade("score" + out).exit_code, 2);  // before ingest
  ASSERT_EQ(Scade("ingest -i " + Quote(dir / "sim" / "events.jsonl") + out).exit_code, 0);
  ASSERT_EQ(Scade("score" + out).exit_code, 0);
  ASSERT_EQ(Scade("threshold" + out).exit_code, 0);
  ASSERT_EQ(Scade("localize --trees 50" + out).exit_code, 0);
  ASSERT_EQ(Scade("report" + out).exit_code, 0);
  EXPECT_EQ(ReadFile(dir / "run" / "verdicts.jsonl"),
            ReadFile(fs::path(SCADE_TEST_DATA_DIR) / "golden_verdicts.jsonl"));
}

TEST(CliTest, PrintScenarioRoundTrips) {
  const auto r = Scade("simulate --print-scenario");
  ASSERT_EQ(r.exit_code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("attacks").size(), 12u);
}

}  // namespace
}  // namespace scade
