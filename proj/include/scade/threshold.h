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

#ifndef SCADE_THRESHOLD_H_
#define SCADE_THRESHOLD_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "scade/event.h"
#include "scade/tokenizer.h"

namespace scade {

enum class ScoreModel { kBm25, kLogEntropy };

// One scoring model applied to one gram granularity.
struct ModelTag {
  ScoreModel model = ScoreModel::kBm25;
  GramMode gram = GramMode::kUnigram;

  std::string ToString() const;  // e.g. "bm25_unigram"
  static std::optional<ModelTag> Parse(std::string_view text);

  friend auto operator<=>(const ModelTag&, const ModelTag&) = default;
};

// The four (model x gram) combinations in report order.
const std::array<ModelTag, 4>& AllModelTags();

enum class Severity { kLow = 0, kMedium = 1, kHigh = 2 };

std::string_view ToString(Severity severity);
std::optional<Severity> ParseSeverity(std::string_view text);

// Standardized distances from the mean.
inline constexpr double kHighSigma = 2.0;
inline constexpr double kMediumSigma = 1.5;
// z within this distance of a cutoff counts as lying on it.
inline constexpr double kBoundaryTolerance = 1e-9;

struct ThresholdModel {
  double mean = 0.0;
  double stddev = 0.0;  // population form
  int window_days = 2;
  ModelTag model_tag;
  std::size_t sample_count = 0;
  bool degenerate = false;  // zero variance: everything is low

  // (score - mean) / std, or 0 for a degenerate model.
  double Standardize(double score) const;
  nlohmann::json ToJson() const;
};

// Population mean and standard deviation of `scores`. Throws a calibration
// error for fewer than two scores.
ThresholdModel Calibrate(std::span<const double> scores, int window_days,
                         ModelTag tag = {});

// high iff z > 2, medium iff 1.5 < z <= 2, low otherwise. Only the upper
// tail is anomalous.
Severity Classify(double score, const ThresholdModel& model);

// Scores retained across runs, keyed by model tag and event fingerprint.
class ScoreStore {
 public:
  struct Entry {
    ModelTag tag;
    Day day{};
    std::uint64_t fingerprint = 0;
    double score = 0.0;
  };

  // Inserts or replaces the entry with the same (tag, fingerprint).
  void Upsert(const Entry& entry);
  std::size_t size() const { return entries_.size(); }

  // Scores whose day lies in [first, last], ordered by (day, fingerprint).
  std::vector<double> Window(const ModelTag& tag, Day first, Day last) const;
  std::optional<Day> LatestDay() const;

  void Write(std::ostream& out) const;  // JSONL
  static ScoreStore Read(std::istream& in);

 private:
  std::map<std::tuple<ModelTag, std::uint64_t>, Entry> entries_;
};

// Calibrates over the store's scores for `tag` with day in
// [now - window_days + 1, now].
ThresholdModel Recalibrate(const ScoreStore& history, const ModelTag& tag,
                           Day now, int window_days);

// FNV-1a 64-bit, used to fingerprint scored events.
std::uint64_t Fingerprint(std::string_view text);

}  // namespace scade

#endif  // SCADE_THRESHOLD_H_
