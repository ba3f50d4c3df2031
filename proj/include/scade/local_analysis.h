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

#ifndef SCADE_LOCAL_ANALYSIS_H_
#define SCADE_LOCAL_ANALYSIS_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "scade/event.h"
#include "scade/isolation_forest.h"

namespace scade {

struct ExecutionStatsRow {
  EventRef event_ref;
  Day day{};
  std::uint64_t flagged_cmd_count_on_asset = 0;
  std::uint64_t total_cmds_on_asset = 0;
  std::uint64_t distinct_assets_running_cmd = 0;
  std::uint64_t user_total_cmd_count = 0;

  friend bool operator==(const ExecutionStatsRow&, const ExecutionStatsRow&) = default;
};

inline constexpr std::size_t kExecutionFeatures = 4;

// Forest input for one row: the four counters, optionally log1p-scaled.
std::array<double, kExecutionFeatures> RowFeatures(const ExecutionStatsRow& row,
                                                   bool log_scale);

// Per-day execution counters over normalized process-creation events.
// Commands are identified by CommandKey(); users by "domain\name".
class EventStore {
 public:
  explicit EventStore(std::span<const ProcessEvent> events);

  const ProcessEvent* Find(EventRef ref) const;
  std::optional<Day> first_day() const { return first_day_; }
  std::optional<Day> last_day() const { return last_day_; }

  std::uint64_t CommandCountOnAsset(std::string_view command,
                                    std::string_view device, Day day) const;
  std::uint64_t TotalOnAsset(std::string_view device, Day day) const;
  std::uint64_t DistinctAssetsRunning(std::string_view command, Day day) const;
  std::uint64_t UserTotal(std::string_view user, Day day) const;

  static std::string UserKey(const ProcessEvent& event);

 private:
  struct KeyHash {
    std::size_t operator()(const std::array<std::int64_t, 3>& k) const;
  };
  using Counter = std::unordered_map<std::array<std::int64_t, 3>, std::uint64_t, KeyHash>;

  static std::uint64_t Get(const Counter& counter,
                           const std::array<std::int64_t, 3>& key);
  std::int64_t Lookup(const std::unordered_map<std::string, std::int64_t>& ids,
                      std::string_view name) const;

  std::vector<ProcessEvent> events_;
  std::unordered_map<std::uint64_t, std::size_t> by_ref_;
  std::unordered_map<std::string, std::int64_t> command_ids_;
  std::unordered_map<std::string, std::int64_t> device_ids_;
  std::unordered_map<std::string, std::int64_t> user_ids_;
  Counter command_on_asset_;  // (command, device, day)
  Counter asset_total_;       // (device, day, -)
  Counter command_assets_;    // (command, day, -) distinct devices
  Counter user_total_;        // (user, day, -)
  std::optional<Day> first_day_;
  std::optional<Day> last_day_;
};

// Flagged events sharing (command, device, user, day) share one set of
// history rows.
struct StatsGroup {
  EventRef representative;  // smallest member ref
  std::vector<EventRef> members;
  std::string command;
  std::string device;
  std::string user;
  Day day{};
  // False when the history window starts before the store's first day.
  bool sufficient_history = true;
  std::vector<ExecutionStatsRow> rows;  // oldest day first, one per day
};

struct ExecutionStats {
  std::vector<StatsGroup> groups;  // ordered by representative
  std::map<EventRef, std::size_t> group_of;

  std::vector<ExecutionStatsRow> AllRows() const;
};

// One row per (flagged payload group x day) for the `days` days ending on
// the event's day; inactive days get zero counters. Throws a data error for
// refs missing from the store.
ExecutionStats GenerateExecutionStats(std::span<const EventRef> flagged,
                                      const EventStore& store, int days);

void WriteStatsCsv(std::ostream& out, const ExecutionStats& stats);

struct LocalParams {
  int history_days = 5;
  IsolationForestParams forest;
  bool log_features = true;

  void Validate() const;
};

enum class LocalStatus { kAnomalous, kNormal, kAbstained };

std::string_view ToString(LocalStatus status);
std::optional<LocalStatus> ParseLocalStatus(std::string_view text);

struct LocalResult {
  LocalStatus status = LocalStatus::kAbstained;
  std::optional<double> score;
  std::string reason;  // set when abstaining
};

// Mean forest score over a payload's rows, compared with the forest cutoff.
struct LocalScore {
  double score = 0.0;
  bool is_local_anomaly = false;
};
LocalScore ScoreLocalAnomaly(const IsolationForest& forest,
                             std::span<const ExecutionStatsRow> rows,
                             bool log_features);

struct LocalAnalysis {
  ExecutionStats stats;
  std::optional<IsolationForest> forest;
  std::map<EventRef, LocalResult> results;  // one per flagged ref
};

// Builds the stats, fits one forest jointly on every group with enough
// history, and scores each group. Groups abstain when their history is
// short or the forest could not be fitted.
LocalAnalysis AnalyzeLocal(std::span<const EventRef> flagged,
                           const EventStore& store, const LocalParams& params,
                           std::size_t threads = 1);

}  // namespace scade

#endif  // SCADE_LOCAL_ANALYSIS_H_
