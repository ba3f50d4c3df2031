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

#include "scade/evaluation.h"

#include <set>
#include <string>

#include "scade/error.h"

namespace scade {

std::vector<VerdictLabel> ReadVerdictLabels(std::istream& in) {
  std::vector<VerdictLabel> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto j = nlohmann::json::parse(line, nullptr, false);
    const auto where = "verdicts line " + std::to_string(line_no);
    if (!j.is_object() || !j.contains("event_ref") ||
        !j["event_ref"].is_number_unsigned() || !j.contains("classification") ||
        !j["classification"].is_string()) {
      throw DataError(where + ": expected event_ref and classification");
    }
    const auto c = ParseClassification(j["classification"].get<std::string>());
    if (!c) throw DataError(where + ": unknown classification");
    out.push_back({EventRef{j["event_ref"].get<std::uint64_t>()}, *c});
  }
  return out;
}

DetectionMetrics Evaluate(std::span<const VerdictLabel> verdicts,
                          std::span<const GroundTruthEntry> truth) {
  std::map<EventRef, Classification> by_ref;
  for (const auto& v : verdicts) {
    if (!by_ref.emplace(v.event_ref, v.classification).second) {
      throw DataError("verdicts list event " + std::to_string(v.event_ref.value) +
                      " more than once");
    }
  }
  std::set<EventRef> positives;
  DetectionMetrics m;
  for (const auto& t : truth) {
    const auto it = by_ref.find(t.event_ref);
    if (it == by_ref.end()) {
      throw DataError("coverage: ground-truth event " +
                      std::to_string(t.event_ref.value) + " has no verdict");
    }
    if (!positives.insert(t.event_ref).second) continue;
    auto& [hit, total] = m.per_kind[t.kind];
    ++total;
    if (it->second == Classification::kTruePositive) ++hit;
  }
  for (const auto& [ref, c] : by_ref) {
    const bool alert = c == Classification::kTruePositive;
    const bool positive = positives.contains(ref);
    if (alert && positive) ++m.true_positives;
    if (alert && !positive) ++m.false_positives;
    if (!alert && positive) ++m.false_negatives;
    if (!alert && !positive) ++m.true_negatives;
  }
  const std::size_t alerts = m.true_positives + m.false_positives;
  m.precision_defined = alerts > 0;
  m.precision = alerts > 0 ? static_cast<double>(m.true_positives) / alerts : 1.0;
  m.recall_defined = !positives.empty();
  m.recall = positives.empty()
                 ? 1.0
                 : static_cast<double>(m.true_positives) / positives.size();
  return m;
}

nlohmann::json DetectionMetrics::ToJson() const {
  nlohmann::json kinds = nlohmann::json::object();
  for (const auto& [kind, counts] : per_kind) {
    kinds[std::string(scade::ToString(kind))] = {{"detected", counts.first},
                                                 {"total", counts.second}};
  }
  return {{"true_positives", true_positives},
          {"false_positives", false_positives},
          {"false_negatives", false_negatives},
          {"true_negatives", true_negatives},
          {"precision", precision},
          {"snr", precision},
          {"recall", recall},
          {"precision_defined", precision_defined},
          {"recall_defined", recall_defined},
          {"per_kind", std::move(kinds)}};
}

}  // namespace scade
