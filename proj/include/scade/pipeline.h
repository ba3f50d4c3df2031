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

#ifndef SCADE_PIPELINE_H_
#define SCADE_PIPELINE_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "scade/config.h"
#include "scade/evaluation.h"
#include "scade/verdicts.h"

namespace scade {

// Artifact file names inside the output directory.
namespace artifacts {
inline constexpr std::string_view kPayloads = "payloads.jsonl";
inline constexpr std::string_view kIngestSummary = "ingest_summary.json";
inline constexpr std::string_view kScores = "scores.jsonl";
inline constexpr std::string_view kThresholds = "thresholds.json";
inline constexpr std::string_view kSeverities = "severities.jsonl";
inline constexpr std::string_view kExecStats = "exec_stats.csv";
inline constexpr std::string_view kLocal = "local.jsonl";
inline constexpr std::string_view kLocalModel = "local_model.json";
inline constexpr std::string_view kVerdicts = "verdicts.jsonl";
inline constexpr std::string_view kAlerts = "alerts.jsonl";
inline constexpr std::string_view kSummary = "summary.json";
std::string CorpusModelFile(GramMode gram);  // "model_unigram.json"
}  // namespace artifacts

struct IngestSummary {
  std::size_t records = 0;
  std::size_t skipped = 0;
  std::size_t filtered_out = 0;  // well-formed but not process creation
  std::size_t payloads = 0;
  std::vector<std::string> diagnostics;

  nlohmann::json ToJson() const;
};

struct RunSummary {
  std::string now;
  std::string window_start;
  std::size_t classified = 0;
  std::size_t flagged = 0;
  VerdictCounts counts;
  std::optional<DetectionMetrics> metrics;

  nlohmann::json ToJson() const;
};

// Each stage reads the previous stage's artifacts from config.output_dir
// and writes its own, so stages can run as separate processes.
IngestSummary RunIngestStage(const RunConfig& config);
void RunScoreStage(const RunConfig& config);
void RunThresholdStage(const RunConfig& config);
void RunLocalizeStage(const RunConfig& config);
RunSummary RunReportStage(const RunConfig& config);

// ingest, score, threshold, localize, report.
RunSummary RunDetect(const RunConfig& config);

}  // namespace scade

#endif  // SCADE_PIPELINE_H_
