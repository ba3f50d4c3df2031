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

#ifndef SCADE_EVALUATION_H_
#define SCADE_EVALUATION_H_

#include <cstddef>
#include <istream>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "scade/synth.h"
#include "scade/verdicts.h"

namespace scade {

struct VerdictLabel {
  EventRef event_ref;
  Classification classification = Classification::kLegitimate;
};

// Reads event_ref and classification from a verdicts JSONL stream.
std::vector<VerdictLabel> ReadVerdictLabels(std::istream& in);

// TruePositive verdicts are alerts; every other class is a non-alert.
struct DetectionMetrics {
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
  std::size_t true_negatives = 0;
  double precision = 1.0;  // also the signal-to-noise ratio
  double recall = 1.0;
  bool precision_defined = true;  // false when there were no alerts
  bool recall_defined = true;     // false when the truth set is empty
  std::map<AttackKind, std::pair<std::size_t, std::size_t>> per_kind;  // hit, total

  nlohmann::json ToJson() const;
};

// Throws a data error (coverage) when a ground-truth ref has no verdict.
DetectionMetrics Evaluate(std::span<const VerdictLabel> verdicts,
                          std::span<const GroundTruthEntry> truth);

}  // namespace scade

#endif  // SCADE_EVALUATION_H_
