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

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "scade/error.h"
#include "scade/pipeline.h"
#include "scade/synth.h"
#include "scade/threshold.h"
#include "test_util.h"

namespace scade {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using testing::ReadFile;
using testing::TempDir;
using testing::WriteFile;

const char* const kCompared[] = {"payloads.jsonl", "scores.jsonl",  "severities.jsonl",
                                 "thresholds.json", "exec_stats.csv", "local.jsonl",
                                 "verdicts.jsonl", "alerts.jsonl",  "summary.json"};

Scenario LoadScenario() {
  std::ifstream in(fs::path(SCADE_TEST_DATA_DIR) / "small_scenario.json");
  return ScenarioFromJson(json::parse(in));
}

// Writes the small scenario's events and truth into `dir`.
InjectedLog WriteScenario(const Scenario& scenario, const fs::path& dir) {
  const auto log = Simulate(scenario);
  std::ofstream events(dir / "events.jsonl");
  WriteEventsJsonl(events, log.events);
  std::ofstream truth(dir / "truth.jsonl");
  WriteTruthJsonl(truth, log.truth);
  return log;
}

RunConfig ConfigFor(const fs::path& input, const fs::path& out) {
  RunConfig c;
  c.input = input;
  c.output_dir = out;
  c.local.forest.n_trees = 50;
  return c;
}

std::vector<json> ReadJsonl(const fs::path& path) {
  std::ifstream in(path);
  std::vector<json> out;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) out.push_back(json::parse(line));
  }
  return out;
}

class PipelineTest : public ::testing::Test {
 protected:
  void SetUp() override { log_ = WriteScenario(LoadScenario(), dir_.path()); }

  fs::path events() const { return dir_ / "events.jsonl"; }

  TempDir dir_;
  InjectedLog log_;
};

TEST_F(PipelineTest, StagesMatchDetect) {
  const auto a = ConfigFor(events(), dir_ / "staged");
  RunIngestStage(a);
  RunScoreStage(a);
  RunThresholdStage(a);
  RunLocalizeStage(a);
  RunReportStage(a);
  const auto b = ConfigFor(events(), dir_ / "detect");
  RunDetect(b);
  for (const char* name : kCompared) {
    EXPECT_EQ(ReadFile(a.output_dir / name), ReadFile(b.output_dir / name)) << name;
  }
}

TEST_F(PipelineTest, RerunsAndThreadCountsAgree) {
  auto c = ConfigFor(events(), dir_ / "one");
  RunDetect(c);
  auto again = ConfigFor(events(), dir_ / "two");
  RunDetect(again);
  auto threaded = ConfigFor(events(), dir_ / "three");
  threaded.threads = 3;
  RunDetect(threaded);
  for (const char* name : kCompared) {
    const auto reference = ReadFile(c.output_dir / name);
    EXPECT_FALSE(reference.empty()) << name;
    EXPECT_EQ(reference, ReadFile(again.output_dir / name)) << name;
    if (std::string_view(name) == "summary.json") continue;
    EXPECT_EQ(reference, ReadFile(threaded.output_dir / name)) << name;
  }
  // The summary echoes the thread count; everything else must agree.
  auto single = json::parse(ReadFile(c.output_dir / "summary.json"));
  auto multi = json::parse(ReadFile(threaded.output_dir / "summary.json"));
  EXPECT_EQ(multi["parameters"]["run"]["threads"], 3);
  single["parameters"].erase("run");
  multi["parameters"].erase("run");
  EXPECT_EQ(single, multi);
}

TEST_F(PipelineTest, MatchesGoldenVerdicts) {
  const auto c = ConfigFor(events(), dir_ / "out");
  RunDetect(c);
  EXPECT_EQ(ReadFile(c.output_dir / "verdicts.jsonl"),
            ReadFile(fs::path(SCADE_TEST_DATA_DIR) / "golden_verdicts.jsonl"));
}

TEST_F(PipelineTest, OneVerdictPerClassifiedPayload) {
  auto c = ConfigFor(events(), dir_ / "out");
  c.truth = dir_ / "truth.jsonl";
  const RunSummary summary = RunDetect(c);
  const auto verdicts = ReadJsonl(c.output_dir / "verdicts.jsonl");
  EXPECT_EQ(verdicts.size(), summary.classified);
  std::set<std::uint64_t> refs;
  for (const auto& v : verdicts) refs.insert(v.at("event_ref").get<std::uint64_t>());
  EXPECT_EQ(refs.size(), verdicts.size());
  EXPECT_EQ(summary.counts.true_positive + summary.counts.benign_positive +
                summary.counts.legitimate,
            summary.classified);
  EXPECT_EQ(summary.counts.true_positive + summary.counts.benign_positive, summary.flagged);
  ASSERT_TRUE(summary.metrics.has_value());
  EXPECT_EQ(summary.metrics->true_positives + summary.metrics->false_negatives,
            log_.truth.size());

  // Alerts hold TruePositive and BenignPositive verdicts only.
  const auto alerts = ReadJsonl(c.output_dir / "alerts.jsonl");
  EXPECT_EQ(alerts.size(), summary.flagged);
  for (const auto& a : alerts) EXPECT_NE(a.at("classification"), "Legitimate");

  const auto written = json::parse(ReadFile(c.output_dir / "summary.json"));
  EXPECT_EQ(written.dump().find(dir_.path().string()), std::string::npos);
}

TEST_F(PipelineTest, AlertsCanOmitBenignPositives) {
  auto c = ConfigFor(events(), dir_ / "out");
  c.include_bp = false;
  const RunSummary summary = RunDetect(c);
  const auto alerts = ReadJsonl(c.output_dir / "alerts.jsonl");
  EXPECT_EQ(alerts.size(), summary.counts.true_positive);
  for (const auto& a : alerts) EXPECT_EQ(a.at("classification"), "TruePositive");
}

TEST_F(PipelineTest, ClassifiesOnlyTheWindow) {
  auto c = ConfigFor(events(), dir_ / "out");
  const RunSummary summary = RunDetect(c);
  const Day last = LoadScenario().workload.StartDay() + std::chrono::days(6);
  EXPECT_EQ(summary.now, FormatDay(last));
  EXPECT_EQ(summary.window_start, FormatDay(last - std::chrono::days(1)));
  std::size_t in_window = 0;
  for (const auto& e : log_.events) in_window += e.day() >= last - std::chrono::days(1);
  EXPECT_EQ(summary.classified, in_window);
}

TEST_F(PipelineTest, BurstOfRoutineCommandsIsNotFlaggedGlobally) {
  auto scenario = LoadScenario();
  AttackTemplate burst;
  burst.kind = AttackKind::kBurstExecutions;
  burst.target_asset = scenario.workload.AssetNames()[1];
  burst.injection_day = scenario.workload.days - 1;
  burst.count = 60;
  scenario.attacks = {burst};
  TempDir dir;
  const auto log = WriteScenario(scenario, dir.path());
  ASSERT_EQ(log.truth.size(), 60u);
  const auto c = ConfigFor(dir / "events.jsonl", dir / "out");
  RunDetect(c);
  std::set<std::uint64_t> burst_refs;
  for (const auto& g : log.truth) burst_refs.insert(g.event_ref.value);
  std::size_t seen = 0;
  for (const auto& line : ReadJsonl(c.output_dir / "severities.jsonl")) {
    if (!burst_refs.contains(line.at("event_ref").get<std::uint64_t>())) continue;
    ++seen;
    for (const auto& [tag, severity] : line.at("severities").items()) {
      EXPECT_EQ(severity, "low") << tag;
    }
  }
  EXPECT_EQ(seen, 60u);
}

TEST_F(PipelineTest, ScoreStoreAccumulatesAndIsIdempotent) {
  auto c = ConfigFor(events(), dir_ / "out");
  c.score_store = dir_ / "store.jsonl";
  RunDetect(c);
  const auto first = ReadFile(*c.score_store);
  ASSERT_FALSE(first.empty());
  const std::string verdicts = ReadFile(c.output_dir / "verdicts.jsonl");
  RunDetect(c);
  EXPECT_EQ(ReadFile(*c.score_store), first);
  EXPECT_EQ(ReadFile(c.output_dir / "verdicts.jsonl"), verdicts);

  // The store holds the same scores, so the thresholds match a run without it.
  auto fresh = ConfigFor(events(), dir_ / "fresh");
  RunDetect(fresh);
  EXPECT_EQ(ReadFile(fresh.output_dir / "thresholds.json"),
            ReadFile(c.output_dir / "thresholds.json"));
}

TEST_F(PipelineTest, ScoreStoreKeepsEarlierDays) {
  // First run sees the first five days only.
  const Day start = LoadScenario().workload.StartDay();
  {
    std::ofstream early(dir_ / "early.jsonl");
    std::vector<ProcessEvent> head;
    for (const auto& e : log_.events) {
      if (e.day() < start + std::chrono::days(5)) head.push_back(e);
    }
    WriteEventsJsonl(early, head);
  }
  auto c = ConfigFor(dir_ / "early.jsonl", dir_ / "out");
  c.score_store = dir_ / "store.jsonl";
  RunDetect(c);
  std::istringstream first(ReadFile(*c.score_store));
  const std::size_t early_size = ScoreStore::Read(first).size();
  EXPECT_GT(early_size, 0u);
  c.input = events();
  RunDetect(c);
  std::istringstream second(ReadFile(*c.score_store));
  EXPECT_GT(ScoreStore::Read(second).size(), early_size);
}

TEST_F(PipelineTest, ExplicitNowMovesTheWindow) {
  auto c = ConfigFor(events(), dir_ / "out");
  const Day start = LoadScenario().workload.StartDay();
  c.now = start + std::chrono::days(3);
  const RunSummary summary = RunDetect(c);
  EXPECT_EQ(summary.now, FormatDay(*c.now));
  std::size_t in_window = 0;
  for (const auto& e : log_.events) {
    in_window += e.day() >= *c.now - std::chrono::days(1) && e.day() <= *c.now;
  }
  EXPECT_EQ(summary.classified, in_window);
}

TEST(PipelineErrorTest, StageNeedsPreviousArtifacts) {
  TempDir dir;
  RunConfig c;
  c.output_dir = dir / "out";
  try {
    RunScoreStage(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kConfig);
    EXPECT_NE(std::string(e.what()).find("ingest"), std::string::npos);
  }
}

TEST(PipelineErrorTest, MostlyMalformedInputIsDataError) {
  TempDir dir;
  WriteFile(dir / "bad.jsonl", "not json\n{\"also\": \"bad\"}\n{broken\n");
  RunConfig c;
  c.input = dir / "bad.jsonl";
  c.output_dir = dir / "out";
  try {
    RunDetect(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kData);
  }
}

}  // namespace
}  // namespace scade
