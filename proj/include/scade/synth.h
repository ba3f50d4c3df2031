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

#ifndef SCADE_SYNTH_H_
#define SCADE_SYNTH_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "scade/event.h"

namespace scade {

// A baseline command. `command` may use {asset} and {user} placeholders.
struct CommandTemplate {
  std::string parent_process;
  std::string process;
  std::string image_path;
  std::string command;
  double weight = 1.0;
  std::string role;  // empty: runs on every asset
};

// A command that runs a fixed number of times every day.
struct DailyTask {
  std::string asset;  // empty: every asset
  std::string user;   // empty: the asset's primary user
  std::string parent_process;
  std::string process;
  std::string image_path;
  std::string command;
  int per_day = 1;
};

struct WorkloadSpec {
  std::size_t n_assets = 20;
  std::size_t n_users = 15;
  int days = 7;
  std::string start_date = "2024-03-04";
  std::size_t events_per_asset_day = 107;
  double jitter = 0.2;  // per-day count noise fraction
  std::uint64_t seed = 7;
  std::string domain = "CORP";
  std::vector<std::string> roles = {"web", "db", "file", "build"};
  std::size_t users_per_asset = 3;
  std::vector<CommandTemplate> baseline_commands;
  std::vector<DailyTask> daily_tasks;

  // Throws a config error: weights must be positive, days >= 7.
  void Validate() const;

  std::vector<std::string> AssetNames() const;
  std::vector<std::string> UserNames() const;
  std::string RoleOf(std::size_t asset_index) const;
  // The users that run commands on an asset; the first is its primary user.
  std::vector<std::string> AssetUsers(std::size_t asset_index) const;
  Day StartDay() const;
};

// Rows of the anomalous-behaviour taxonomy the harness can inject.
enum class AttackKind {
  kPathVariation,
  kUnusualParameterCombo,
  kWrongAsset,
  kUnexpectedParent,
  kBurstExecutions,
  kRareBinary,
};

std::string_view ToString(AttackKind kind);
std::optional<AttackKind> ParseAttackKind(std::string_view text);

struct AttackTemplate {
  AttackKind kind = AttackKind::kRareBinary;
  int injection_day = 0;  // offset from the workload start
  std::string target_asset;
  std::string target_user;  // empty: the asset's second user
  int variant = 0;          // picks a payload from the kind's bank
  int count = 1;            // executions; burst templates use many
};

// Parent processes the generator never uses for baseline commands.
const std::vector<std::string>& UnexpectedParentBank();

struct Scenario {
  WorkloadSpec workload;
  std::vector<AttackTemplate> attacks;
};

// The bundled red-team drill: 20 assets, 15 users, 7 days, ~15k baseline
// events and 12 injected attacks over four kinds, plus a daily admin
// self-test that is rare across the estate but routine on its asset.
Scenario DefaultScenario();

// The admin self-test in DefaultScenario().
inline constexpr std::string_view kAdminSelfTestCommand =
    "c:\\tools\\healthprobe.exe --selftest --quiet";

nlohmann::json ToJson(const Scenario& scenario);
Scenario ScenarioFromJson(const nlohmann::json& j);

// Events in timestamp order with refs 1..n.
std::vector<ProcessEvent> GenerateWorkload(const WorkloadSpec& spec);

struct GroundTruthEntry {
  EventRef event_ref;
  AttackKind kind = AttackKind::kRareBinary;
};

struct InjectedLog {
  std::vector<ProcessEvent> events;  // re-sorted, refs reassigned 1..n
  std::vector<GroundTruthEntry> truth;
};

// Interleaves attack events into `log` at seeded times on their injection
// days. Throws a config error for unknown assets or out-of-range days.
InjectedLog InjectAttacks(std::span<const ProcessEvent> log,
                          std::span<const AttackTemplate> templates,
                          const WorkloadSpec& spec);

InjectedLog Simulate(const Scenario& scenario);

// JSONL in the ingest schema.
void WriteEventsJsonl(std::ostream& out, std::span<const ProcessEvent> events);
void WriteTruthJsonl(std::ostream& out, std::span<const GroundTruthEntry> truth);
std::vector<GroundTruthEntry> ReadTruthJsonl(std::istream& in);

}  // namespace scade

#endif  // SCADE_SYNTH_H_
