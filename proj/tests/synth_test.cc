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

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "scade/error.h"
#include "scade/ingest.h"
#include "scade/scoring.h"
#include "scade/synth.h"
#include "scade/tokenizer.h"

namespace scade {
namespace {

WorkloadSpec PlainSpec() {
  WorkloadSpec spec;
  spec.n_assets = 10;
  spec.n_users = 6;
  spec.days = 7;
  spec.events_per_asset_day = 100;
  spec.jitter = 0.0;
  spec.roles = {"app"};
  spec.baseline_commands = {
      {"services.exe", "svchost.exe", "c:\\windows\\system32\\svchost.exe",
       "svchost.exe -k netsvcs", 5, ""},
      {"cmd.exe", "tasklist.exe", "c:\\windows\\system32\\tasklist.exe", "tasklist /v", 3, ""},
      {"cmd.exe", "ipconfig.exe", "c:\\windows\\system32\\ipconfig.exe", "ipconfig /all", 2, ""},
  };
  return spec;
}

std::string Jsonl(std::span<const ProcessEvent> events) {
  std::ostringstream out;
  WriteEventsJsonl(out, events);
  return out.str();
}

TEST(WorkloadTest, ExactCountWithoutJitter) {
  const auto events = GenerateWorkload(PlainSpec());
  EXPECT_EQ(events.size(), 7000u);
  std::map<std::string, int> per_command;
  for (const auto& e : events) ++per_command[e.command_line];
  EXPECT_EQ(per_command["svchost.exe -k netsvcs"], 3500);
  EXPECT_EQ(per_command["tasklist /v"], 2100);
  EXPECT_EQ(per_command["ipconfig /all"], 1400);
}

TEST(WorkloadTest, DeterministicSortedAndNumbered) {
  auto spec = PlainSpec();
  spec.jitter = 0.2;
  const auto a = GenerateWorkload(spec);
  const auto b = GenerateWorkload(spec);
  EXPECT_EQ(Jsonl(a), Jsonl(b));
  spec.seed = 8;
  EXPECT_NE(Jsonl(a), Jsonl(GenerateWorkload(spec)));
  const Day start = spec.StartDay();
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].ref.value, i + 1);
    EXPECT_EQ(a[i].event_id, kProcessCreationEventId);
    if (i) {
      EXPECT_LE(a[i - 1].timestamp, a[i].timestamp);
    }
    EXPECT_GE(a[i].day(), start);
    EXPECT_LT(a[i].day(), start + std::chrono::days(spec.days));
  }
}

TEST(WorkloadTest, FrequencyRatioNineToOne) {
  WorkloadSpec spec = PlainSpec();
  spec.days = 10;
  spec.jitter = 0.2;
  spec.baseline_commands = {
      {"cmd.exe", "a.exe", "", "a.exe", 9, ""},
      {"cmd.exe", "b.exe", "", "b.exe", 1, ""},
  };
  const auto events = GenerateWorkload(spec);
  EXPECT_NEAR(static_cast<double>(events.size()), 10000.0, 500.0);
  double a = 0, b = 0;
  for (const auto& e : events) (e.command_line == "a.exe" ? a : b) += 1;
  EXPECT_NEAR(a / b, 9.0, 0.45);
}

TEST(WorkloadTest, OutputMatchesIngestSchema) {
  const auto events = GenerateWorkload(PlainSpec());
  std::istringstream in(Jsonl(events));
  const auto parsed = ParseEvents(in, InputFormat::kJsonl);
  EXPECT_EQ(parsed.skipped, 0u);
  EXPECT_EQ(parsed.events, events);
}

TEST(WorkloadTest, ValidationErrors) {
  auto spec = PlainSpec();
  spec.days = 6;
  EXPECT_THROW(GenerateWorkload(spec), Error);
  spec = PlainSpec();
  spec.baseline_commands[0].weight = 0.0;
  EXPECT_THROW(GenerateWorkload(spec), Error);
  spec = PlainSpec();
  spec.baseline_commands[0].role = "nope";
  EXPECT_THROW(spec.Validate(), Error);
}

TEST(WorkloadTest, AssetsUsersAndRoles) {
  const auto spec = DefaultScenario().workload;
  const auto assets = spec.AssetNames();
  ASSERT_EQ(assets.size(), 20u);
  EXPECT_EQ(assets[0], "web-srv-01");
  EXPECT_EQ(assets[19], "build-srv-20");
  EXPECT_EQ(spec.UserNames().size(), 15u);
  EXPECT_EQ(spec.AssetUsers(1), (std::vector<std::string>{"svc_monitor", "svc_sql", "adm_alice"}));
  EXPECT_EQ(std::set<std::string>(assets.begin(), assets.end()).size(), 20u);
}

TEST(InjectTest, ZeroTemplatesIsIdentity) {
  const auto spec = PlainSpec();
  const auto log = GenerateWorkload(spec);
  const auto out = InjectAttacks(log, {}, spec);
  EXPECT_EQ(out.events, log);
  EXPECT_TRUE(out.truth.empty());
}

TEST(InjectTest, FiveRareBinaryEvents) {
  const auto spec = PlainSpec();
  const auto log = GenerateWorkload(spec);
  AttackTemplate t;
  t.kind = AttackKind::kRareBinary;
  t.target_asset = spec.AssetNames()[2];
  t.injection_day = 6;
  t.count = 5;
  const std::vector<AttackTemplate> templates = {t};
  const auto out = InjectAttacks(log, templates, spec);
  ASSERT_EQ(out.truth.size(), 5u);
  EXPECT_EQ(out.events.size(), log.size() + 5);
  for (const auto& g : out.truth) {
    const auto& e = out.events[g.event_ref.value - 1];
    EXPECT_EQ(e.ref, g.event_ref);
    EXPECT_EQ(e.device_id, t.target_asset);
    EXPECT_EQ(e.process_name, "mshta.exe");
    EXPECT_EQ(e.day(), spec.StartDay() + std::chrono::days(6));
    EXPECT_EQ(e.account_name, spec.AssetUsers(2)[1]);
    EXPECT_EQ(g.kind, AttackKind::kRareBinary);
  }
  for (std::size_t i = 1; i < out.events.size(); ++i) {
    EXPECT_LE(out.events[i - 1].timestamp, out.events[i].timestamp);
  }
}

TEST(InjectTest, UnexpectedParentIsOutsideBaselineVocabulary) {
  const auto scenario = DefaultScenario();
  const auto baseline = GenerateWorkload(scenario.workload);
  std::set<std::string> vocabulary;
  for (const auto& e : baseline) {
    std::istringstream words(NormalizeText(BuildPayload(e, DefaultAttributeOrder()).text));
    for (std::string w; words >> w;) vocabulary.insert(w);
  }
  for (int variant = 0; variant < 4; ++variant) {
    AttackTemplate t;
    t.kind = AttackKind::kUnexpectedParent;
    t.variant = variant;
    t.target_asset = scenario.workload.AssetNames()[5];
    t.injection_day = 6;
    const std::vector<AttackTemplate> templates = {t};
    const auto out = InjectAttacks(baseline, templates, scenario.workload);
    ASSERT_EQ(out.truth.size(), 1u);
    const auto& e = out.events[out.truth[0].event_ref.value - 1];
    EXPECT_FALSE(vocabulary.contains(NormalizeText(e.parent_process_name)))
        << e.parent_process_name;
  }
}

TEST(InjectTest, WrongAssetAndBurstUseBaselineCommands) {
  const auto scenario = DefaultScenario();
  const auto& spec = scenario.workload;
  const auto baseline = GenerateWorkload(spec);
  AttackTemplate wrong;
  wrong.kind = AttackKind::kWrongAsset;
  wrong.target_asset = spec.AssetNames()[0];  // a web server
  wrong.injection_day = 6;
  AttackTemplate burst;
  burst.kind = AttackKind::kBurstExecutions;
  burst.target_asset = spec.AssetNames()[1];
  burst.injection_day = 6;
  burst.count = 40;
  const std::vector<AttackTemplate> templates = {wrong, burst};
  const auto out = InjectAttacks(baseline, templates, spec);
  ASSERT_EQ(out.truth.size(), 41u);
  std::set<std::string> web_commands, routine;
  for (const auto& c : spec.baseline_commands) {
    if (c.role == "web" || c.role.empty()) web_commands.insert(c.command);
    routine.insert(c.command);
  }
  for (const auto& g : out.truth) {
    const auto& e = out.events[g.event_ref.value - 1];
    EXPECT_TRUE(routine.contains(e.command_line));
    if (g.kind == AttackKind::kWrongAsset) {
      EXPECT_FALSE(web_commands.contains(e.command_line));
    }
  }
}

TEST(InjectTest, SpecErrors) {
  const auto spec = PlainSpec();
  const auto log = GenerateWorkload(spec);
  AttackTemplate t;
  t.target_asset = "no-such-host";
  try {
    InjectAttacks(log, std::vector<AttackTemplate>{t}, spec);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kConfig);
  }
  t.target_asset = spec.AssetNames()[0];
  t.injection_day = 7;
  EXPECT_THROW(InjectAttacks(log, std::vector<AttackTemplate>{t}, spec), Error);
}

TEST(ScenarioTest, DefaultDrillShape) {
  const auto scenario = DefaultScenario();
  EXPECT_EQ(scenario.workload.n_assets, 20u);
  EXPECT_EQ(scenario.workload.n_users, 15u);
  EXPECT_EQ(scenario.workload.days, 7);
  ASSERT_EQ(scenario.attacks.size(), 12u);
  std::map<AttackKind, int> kinds;
  for (const auto& a : scenario.attacks) ++kinds[a.kind];
  EXPECT_EQ(kinds.size(), 4u);
  for (const auto& [kind, n] : kinds) EXPECT_EQ(n, 3);
  const auto baseline = GenerateWorkload(scenario.workload);
  EXPECT_GT(baseline.size(), 14000u);
  EXPECT_LT(baseline.size(), 16000u);
  const auto log = Simulate(scenario);
  EXPECT_EQ(log.truth.size(), 12u);
  EXPECT_EQ(log.events.size(), baseline.size() + 12);
}

TEST(ScenarioTest, JsonRoundTrip) {
  const auto scenario = DefaultScenario();
  const auto j = ToJson(scenario);
  EXPECT_EQ(ToJson(ScenarioFromJson(j)), j);
  auto bad = j;
  bad["attacks"][0]["kind"] = "teleport";
  EXPECT_THROW(ScenarioFromJson(bad), Error);
  EXPECT_EQ(ScenarioFromJson(nlohmann::json::object()).workload.n_assets, 20u);
}

TEST(ScenarioTest, TruthFileRoundTrip) {
  const auto log = Simulate(DefaultScenario());
  std::stringstream buf;
  WriteTruthJsonl(buf, log.truth);
  const auto back = ReadTruthJsonl(buf);
  ASSERT_EQ(back.size(), log.truth.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].event_ref, log.truth[i].event_ref);
    EXPECT_EQ(back[i].kind, log.truth[i].kind);
  }
  std::istringstream bad("{\"ref\":1}\n");
  EXPECT_THROW(ReadTruthJsonl(bad), Error);
}

TEST(ScenarioTest, RareBinaryOutscoresMedianBaseline) {
  for (const std::uint64_t seed : {7u, 8u, 9u}) {
    auto scenario = DefaultScenario();
    scenario.workload.seed = seed;
    const auto log = Simulate(scenario);
    std::vector<TokenizedDoc> docs;
    for (const auto& e : log.events) {
      docs.push_back(Tokenize(BuildPayload(Normalize(e), DefaultAttributeOrder()),
                              GramMode::kUnigram));
    }
    const auto model = BuildCorpusModel(docs);
    const auto scores = ScoreCorpus(docs, model, {}, GramMode::kUnigram);
    std::set<EventRef> attacks;
    for (const auto& g : log.truth) attacks.insert(g.event_ref);
    std::vector<double> baseline;
    for (const auto& s : scores) {
      if (!attacks.contains(s.event_ref)) baseline.push_back(s.bm25_score);
    }
    std::nth_element(baseline.begin(), baseline.begin() + baseline.size() / 2, baseline.end());
    const double median = baseline[baseline.size() / 2];
    for (const auto& g : log.truth) {
      if (g.kind != AttackKind::kRareBinary) continue;
      EXPECT_GT(scores[g.event_ref.value - 1].bm25_score, median);
    }
  }
}

TEST(AttackKindTest, Names) {
  EXPECT_EQ(ToString(AttackKind::kUnusualParameterCombo), "unusual-parameter-combo");
  EXPECT_EQ(ParseAttackKind("burst-executions"), AttackKind::kBurstExecutions);
  EXPECT_FALSE(ParseAttackKind("x"));
}

}  // namespace
}  // namespace scade
