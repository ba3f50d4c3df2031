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

#include "scade/verdicts.h"

#include <algorithm>
#include <limits>

#include "scade/error.h"

namespace scade {
namespace {

int Rank(Classification c) {
  switch (c) {
    case Classification::kTruePositive:
      return 0;
    case Classification::kBenignPositive:
      return 1;
    case Classification::kLegitimate:
      return 2;
  }
  return 2;
}

}  // namespace

double GlobalAssessment::MaxStandardized() const {
  if (standardized.empty()) return 0.0;
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& [tag, z] : standardized) best = std::max(best, z);
  return best;
}

bool IsFlagged(const GlobalAssessment& assessment) {
  return std::any_of(assessment.severities.begin(), assessment.severities.end(),
                     [](const auto& entry) { return entry.second != Severity::kLow; });
}

std::vector<EventRef> FilterFlagged(std::span<const GlobalAssessment> records) {
  std::vector<EventRef> flagged;
  for (const auto& record : records) {
    if (IsFlagged(record)) flagged.push_back(record.event_ref);
  }
  return flagged;
}

std::string_view ToString(Classification c) {
  switch (c) {
    case Classification::kTruePositive:
      return "TruePositive";
    case Classification::kBenignPositive:
      return "BenignPositive";
    case Classification::kLegitimate:
      return "Legitimate";
  }
  return "Legitimate";
}

std::optional<Classification> ParseClassification(std::string_view text) {
  if (text == "TruePositive") return Classification::kTruePositive;
  if (text == "BenignPositive") return Classification::kBenignPositive;
  if (text == "Legitimate") return Classification::kLegitimate;
  return std::nullopt;
}

std::string_view ToString(Confidence c) {
  return c == Confidence::kNormal ? "normal" : "low";
}

Verdict Combine(const GlobalAssessment& flagged, const LocalResult& local) {
  if (!IsFlagged(flagged)) {
    throw InternalError("combine called on unflagged record " +
                        std::to_string(flagged.event_ref.value));
  }
  Verdict verdict;
  verdict.event_ref = flagged.event_ref;
  verdict.global = flagged;
  verdict.local = local;
  switch (local.status) {
    case LocalStatus::kAnomalous:
      verdict.classification = Classification::kTruePositive;
      break;
    case LocalStatus::kNormal:
      verdict.classification = Classification::kBenignPositive;
      break;
    case LocalStatus::kAbstained:
      verdict.classification = Classification::kTruePositive;
      verdict.confidence = Confidence::kLow;
      break;
  }
  return verdict;
}

std::vector<Verdict> Finalize(std::span<const GlobalAssessment> payloads,
                              const std::map<EventRef, LocalResult>& local) {
  std::vector<Verdict> verdicts;
  verdicts.reserve(payloads.size());
  for (const auto& payload : payloads) {
    if (!IsFlagged(payload)) {
      Verdict verdict;
      verdict.event_ref = payload.event_ref;
      verdict.global = payload;
      verdicts.push_back(std::move(verdict));
      continue;
    }
    const auto it = local.find(payload.event_ref);
    if (it == local.end()) {
      verdicts.push_back(Combine(
          payload, LocalResult{LocalStatus::kAbstained, std::nullopt,
                               "no local analysis result"}));
    } else {
      verdicts.push_back(Combine(payload, it->second));
    }
  }
  std::stable_sort(verdicts.begin(), verdicts.end(),
                   [](const Verdict& a, const Verdict& b) {
                     const int ra = Rank(a.classification);
                     const int rb = Rank(b.classification);
                     if (ra != rb) return ra < rb;
                     const double za = a.global.MaxStandardized();
                     const double zb = b.global.MaxStandardized();
                     if (za != zb) return za > zb;
                     return a.event_ref < b.event_ref;
                   });
  return verdicts;
}

nlohmann::json VerdictToJson(const Verdict& verdict, std::size_t top_attributions) {
  nlohmann::json severities = nlohmann::json::object();
  nlohmann::json scores = nlohmann::json::object();
  for (const auto& [tag, severity] : verdict.global.severities) {
    severities[tag.ToString()] = ToString(severity);
  }
  for (const auto& [tag, score] : verdict.global.scores) {
    scores[tag.ToString()] = score;
  }
  nlohmann::json attributions = nlohmann::json::array();
  const auto& top = verdict.global.top_attributions;
  for (std::size_t i = 0; i < top.size() && i < top_attributions; ++i) {
    attributions.push_back({{"token", top[i].attribution.token},
                            {"gram_mode", ToString(top[i].gram)},
                            {"bm25", top[i].attribution.bm25},
                            {"log_entropy", top[i].attribution.log_entropy}});
  }
  nlohmann::json j = {
      {"event_ref", verdict.event_ref.value},
      {"classification", ToString(verdict.classification)},
      {"confidence", ToString(verdict.confidence)},
      {"severities", std::move(severities)},
      {"scores", std::move(scores)},
      {"max_standardized_score", verdict.global.MaxStandardized()},
  };
  if (verdict.local) {
    j["local_decision"] = ToString(verdict.local->status);
    j["local_score"] = verdict.local->score ? nlohmann::json(*verdict.local->score)
                                            : nlohmann::json(nullptr);
  } else {
    j["local_decision"] = nullptr;
    j["local_score"] = nullptr;
  }
  j["top_attributions"] = std::move(attributions);
  return j;
}

VerdictCounts CountVerdicts(std::span<const Verdict> verdicts) {
  VerdictCounts counts;
  for (const auto& v : verdicts) {
    switch (v.classification) {
      case Classification::kTruePositive:
        ++counts.true_positive;
        break;
      case Classification::kBenignPositive:
        ++counts.benign_positive;
        break;
      case Classification::kLegitimate:
        ++counts.legitimate;
        break;
    }
    if (v.confidence == Confidence::kLow) ++counts.low_confidence;
  }
  return counts;
}

}  // namespace scade
