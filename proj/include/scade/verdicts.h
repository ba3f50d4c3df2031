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

#ifndef SCADE_VERDICTS_H_
#define SCADE_VERDICTS_H_

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "scade/event.h"
#include "scade/local_analysis.h"
#include "scade/scoring.h"
#include "scade/threshold.h"

namespace scade {

struct GramAttribution {
  GramMode gram = GramMode::kUnigram;
  TokenAttribution attribution;
};

// Global-layer evidence for one payload.
struct GlobalAssessment {
  EventRef event_ref;
  std::map<ModelTag, Severity> severities;
  std::map<ModelTag, double> scores;
  std::map<ModelTag, double> standardized;
  std::vector<GramAttribution> top_attributions;

  double MaxStandardized() const;
};

// True when any model/gram severity is high or medium.
bool IsFlagged(const GlobalAssessment& assessment);
std::vector<EventRef> FilterFlagged(std::span<const GlobalAssessment> records);

enum class Classification { kTruePositive, kBenignPositive, kLegitimate };
enum class Confidence { kNormal, kLow };

std::string_view ToString(Classification c);
std::optional<Classification> ParseClassification(std::string_view text);
std::string_view ToString(Confidence c);

struct Verdict {
  EventRef event_ref;
  Classification classification = Classification::kLegitimate;
  Confidence confidence = Confidence::kNormal;
  GlobalAssessment global;
  std::optional<LocalResult> local;  // absent for unflagged payloads
};

// Flagged payload + local decision: anomalous -> TruePositive, normal ->
// BenignPositive, abstained -> TruePositive with low confidence.
Verdict Combine(const GlobalAssessment& flagged, const LocalResult& local);

// Every payload exactly once: unflagged ones become Legitimate. Sorted by
// class (TP, BP, Legitimate), then descending max standardized score, then
// event ref. Flagged payloads without a local result count as abstained.
std::vector<Verdict> Finalize(std::span<const GlobalAssessment> payloads,
                              const std::map<EventRef, LocalResult>& local);

nlohmann::json VerdictToJson(const Verdict& verdict,
                             std::size_t top_attributions = 5);

struct VerdictCounts {
  std::size_t true_positive = 0;
  std::size_t benign_positive = 0;
  std::size_t legitimate = 0;
  std::size_t low_confidence = 0;
};

VerdictCounts CountVerdicts(std::span<const Verdict> verdicts);

}  // namespace scade

#endif  // SCADE_VERDICTS_H_
