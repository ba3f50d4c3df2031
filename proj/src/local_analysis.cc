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

#include "scade/local_analysis.h"

#include <algorithm>
#include <cmath>
#include <tuple>
#include <unordered_set>

#include "scade/error.h"
#include "scade/ingest.h"
#include "scade/parallel.h"

namespace scade {
namespace {

std::int64_t Intern(std::unordered_map<std::string, std::int64_t>& ids,
                    const std::string& name) {
  const auto [it, inserted] =
      ids.emplace(name, static_cast<std::int64_t>(ids.size()));
  return it->second;
}

std::int64_t DayNumber(Day day) { return day.time_since_epoch().count(); }

}  // namespace

std::size_t EventStore::KeyHash::operator()(
    const std::array<std::int64_t, 3>& k) const {
  std::uint64_t h = 0x9e3779b97f4a7c15ull;
  for (const std::int64_t v : k) {
    h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

std::uint64_t EventStore::Get(const Counter& counter,
                              const std::array<std::int64_t, 3>& key) {
  const auto it = counter.find(key);
  return it == counter.end() ? 0 : it->second;
}

std::array<double, kExecutionFeatures> RowFeatures(const ExecutionStatsRow& row,
                                                   bool log_scale) {
  std::array<double, kExecutionFeatures> f = {
      static_cast<double>(row.flagged_cmd_count_on_asset),
      static_cast<double>(row.total_cmds_on_asset),
      static_cast<double>(row.distinct_assets_running_cmd),
      static_cast<double>(row.user_total_cmd_count),
  };
  if (log_scale) {
    for (double& v : f) v = std::log1p(v);
  }
  return f;
}

std::string EventStore::UserKey(const ProcessEvent& event) {
  return event.account_domain + '\\' + event.account_name;
}

EventStore::EventStore(std::span<const ProcessEvent> events)
    : events_(events.begin(), events.end()) {
  std::unordered_set<std::array<std::int64_t, 3>, KeyHash> seen_assets;
  for (std::size_t i = 0; i < events_.size(); ++i) {
    const ProcessEvent& e = events_[i];
    by_ref_.emplace(e.ref.value, i);
    const Day day = e.day();
    if (!first_day_ || day < *first_day_) first_day_ = day;
    if (!last_day_ || day > *last_day_) last_day_ = day;
    const std::int64_t d = DayNumber(day);
    const std::int64_t cmd = Intern(command_ids_, CommandKey(e));
    const std::int64_t dev = Intern(device_ids_, e.device_id);
    const std::int64_t usr = Intern(user_ids_, UserKey(e));
    ++command_on_asset_[{cmd, dev, d}];
    ++asset_total_[{dev, d, 0}];
    ++user_total_[{usr, d, 0}];
    if (seen_assets.insert({cmd, dev, d}).second) ++command_assets_[{cmd, d, 0}];
  }
}

const ProcessEvent* EventStore::Find(EventRef ref) const {
  const auto it = by_ref_.find(ref.value);
  return it == by_ref_.end() ? nullptr : &events_[it->second];
}

std::int64_t EventStore::Lookup(
    const std::unordered_map<std::string, std::int64_t>& ids,
    std::string_view name) const {
  const auto it = ids.find(std::string(name));
  return it == ids.end() ? -1 : it->second;
}

std::uint64_t EventStore::CommandCountOnAsset(std::string_view command,
                                              std::string_view device,
                                              Day day) const {
  const auto cmd = Lookup(command_ids_, command);
  const auto dev = Lookup(device_ids_, device);
  if (cmd < 0 || dev < 0) return 0;
  return Get(command_on_asset_, {cmd, dev, DayNumber(day)});
}

std::uint64_t EventStore::TotalOnAsset(std::string_view device, Day day) const {
  const auto dev = Lookup(device_ids_, device);
  return dev < 0 ? 0 : Get(asset_total_, {dev, DayNumber(day), 0});
}

std::uint64_t EventStore::DistinctAssetsRunning(std::string_view command,
                                                Day day) const {
  const auto cmd = Lookup(command_ids_, command);
  return cmd < 0 ? 0 : Get(command_assets_, {cmd, DayNumber(day), 0});
}

std::uint64_t EventStore::UserTotal(std::string_view user, Day day) const {
  const auto usr = Lookup(user_ids_, user);
  return usr < 0 ? 0 : Get(user_total_, {usr, DayNumber(day), 0});
}

std::vector<ExecutionStatsRow> ExecutionStats::AllRows() const {
  std::vector<ExecutionStatsRow> rows;
  for (const auto& group : groups) {
    rows.insert(rows.end(), group.rows.begin(), group.rows.end());
  }
  return rows;
}

ExecutionStats GenerateExecutionStats(std::span<const EventRef> flagged,
                                      const EventStore& store, int days) {
  if (days < 1) throw ConfigError("history days must be >= 1");
  using GroupKey = std::tuple<std::string, std::string, std::string, Day>;
  std::map<GroupKey, StatsGroup> grouped;
  for (const EventRef ref : flagged) {
    const ProcessEvent* event = store.Find(ref);
    if (event == nullptr) {
      throw DataError("local analysis: flagged record " +
                      std::to_string(ref.value) + " not found in event store");
    }
    GroupKey key{CommandKey(*event), event->device_id, EventStore::UserKey(*event),
                 event->day()};
    StatsGroup& group = grouped[key];
    if (group.members.empty()) {
      group.command = std::get<0>(key);
      group.device = std::get<1>(key);
      group.user = std::get<2>(key);
      group.day = std::get<3>(key);
      group.representative = ref;
    }
    group.members.push_back(ref);
    group.representative = std::min(group.representative, ref);
  }

  ExecutionStats stats;
  for (auto& [key, group] : grouped) {
    std::sort(group.members.begin(), group.members.end());
    const Day first = group.day - std::chrono::days{days - 1};
    group.sufficient_history = store.first_day() && first >= *store.first_day();
    for (Day day = first; day <= group.day; day += std::chrono::days{1}) {
      ExecutionStatsRow row;
      row.event_ref = group.representative;
      row.day = day;
      row.flagged_cmd_count_on_asset =
          store.CommandCountOnAsset(group.command, group.device, day);
      row.total_cmds_on_asset = store.TotalOnAsset(group.device, day);
      row.distinct_assets_running_cmd = store.DistinctAssetsRunning(group.command, day);
      row.user_total_cmd_count = store.UserTotal(group.user, day);
      group.rows.push_back(row);
    }
    stats.groups.push_back(std::move(group));
  }
  std::sort(stats.groups.begin(), stats.groups.end(),
            [](const StatsGroup& a, const StatsGroup& b) {
              return a.representative < b.representative;
            });
  for (std::size_t g = 0; g < stats.groups.size(); ++g) {
    for (const EventRef ref : stats.groups[g].members) stats.group_of[ref] = g;
  }
  return stats;
}

void WriteStatsCsv(std::ostream& out, const ExecutionStats& stats) {
  out << "event_ref,day,flagged_cmd_count_on_asset,total_cmds_on_asset,"
         "distinct_assets_running_cmd,user_total_cmd_count\n";
  for (const auto& row : stats.AllRows()) {
    out << row.event_ref.value << ',' << FormatDay(row.day) << ','
        << row.flagged_cmd_count_on_asset << ',' << row.total_cmds_on_asset << ','
        << row.distinct_assets_running_cmd << ',' << row.user_total_cmd_count
        << '\n';
  }
}

void LocalParams::Validate() const {
  if (history_days < 1) throw ConfigError("history_days must be >= 1");
  forest.Validate();
}

std::string_view ToString(LocalStatus status) {
  switch (status) {
    case LocalStatus::kAnomalous:
      return "anomalous";
    case LocalStatus::kNormal:
      return "normal";
    case LocalStatus::kAbstained:
      return "abstained";
  }
  return "abstained";
}

std::optional<LocalStatus> ParseLocalStatus(std::string_view text) {
  if (text == "anomalous") return LocalStatus::kAnomalous;
  if (text == "normal") return LocalStatus::kNormal;
  if (text == "abstained") return LocalStatus::kAbstained;
  return std::nullopt;
}

LocalScore ScoreLocalAnomaly(const IsolationForest& forest,
                             std::span<const ExecutionStatsRow> rows,
                             bool log_features) {
  if (rows.empty()) throw InternalError("local scoring needs at least one row");
  double total = 0.0;
  for (const auto& row : rows) {
    const auto features = RowFeatures(row, log_features);
    total += forest.Score(features);
  }
  LocalScore result;
  result.score = total / static_cast<double>(rows.size());
  result.is_local_anomaly = forest.IsAnomalous(result.score);
  return result;
}

LocalAnalysis AnalyzeLocal(std::span<const EventRef> flagged,
                           const EventStore& store, const LocalParams& params,
                           std::size_t threads) {
  params.Validate();
  LocalAnalysis analysis;
  analysis.stats = GenerateExecutionStats(flagged, store, params.history_days);

  FeatureMatrix training(kExecutionFeatures);
  for (const auto& group : analysis.stats.groups) {
    if (!group.sufficient_history) continue;
    for (const auto& row : group.rows) {
      training.AddRow(RowFeatures(row, params.log_features));
    }
  }
  analysis.forest = IsolationForest::Fit(training, params.forest, threads);

  std::vector<LocalResult> group_results(analysis.stats.groups.size());
  ParallelFor(group_results.size(), threads, [&](std::size_t g) {
    const StatsGroup& group = analysis.stats.groups[g];
    LocalResult& result = group_results[g];
    if (!group.sufficient_history) {
      result.reason = "history window starts before the earliest event";
      return;
    }
    if (!analysis.forest) {
      result.reason = "too few execution rows to fit the forest";
      return;
    }
    const LocalScore local =
        ScoreLocalAnomaly(*analysis.forest, group.rows, params.log_features);
    result.score = local.score;
    result.status =
        local.is_local_anomaly ? LocalStatus::kAnomalous : LocalStatus::kNormal;
  });
  for (const auto& [ref, g] : analysis.stats.group_of) {
    analysis.results[ref] = group_results[g];
  }
  return analysis;
}

}  // namespace scade
