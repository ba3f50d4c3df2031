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

#include "scade/threshold.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "scade/error.h"

namespace scade {
namespace {

constexpr std::string_view kSeparator = "_";

}  // namespace

std::string ModelTag::ToString() const {
  std::string out = model == ScoreModel::kBm25 ? "bm25" : "log_entropy";
  out.append(kSeparator);
  out.append(scade::ToString(gram));
  return out;
}

std::optional<ModelTag> ModelTag::Parse(std::string_view text) {
  for (const auto& tag : AllModelTags()) {
    if (tag.ToString() == text) return tag;
  }
  return std::nullopt;
}

const std::array<ModelTag, 4>& AllModelTags() {
  static const std::array<ModelTag, 4> kTags = {
      ModelTag{ScoreModel::kBm25, GramMode::kUnigram},
      ModelTag{ScoreModel::kBm25, GramMode::kBigram},
      ModelTag{ScoreModel::kLogEntropy, GramMode::kUnigram},
      ModelTag{ScoreModel::kLogEntropy, GramMode::kBigram},
  };
  return kTags;
}

std::string_view ToString(Severity severity) {
  switch (severity) {
    case Severity::kLow:
      return "low";
    case Severity::kMedium:
      return "medium";
    case Severity::kHigh:
      return "high";
  }
  return "low";
}

std::optional<Severity> ParseSeverity(std::string_view text) {
  if (text == "low") return Severity::kLow;
  if (text == "medium") return Severity::kMedium;
  if (text == "high") return Severity::kHigh;
  return std::nullopt;
}

double ThresholdModel::Standardize(double score) const {
  if (degenerate) return 0.0;
  return (score - mean) / stddev;
}

nlohmann::json ThresholdModel::ToJson() const {
  return {
      {"model", model_tag.ToString()}, {"mean", mean},
      {"std", stddev},                 {"window_days", window_days},
      {"samples", sample_count},       {"degenerate", degenerate},
  };
}

ThresholdModel Calibrate(std::span<const double> scores, int window_days,
                         ModelTag tag) {
  if (scores.size() < 2) {
    throw CalibrationError("calibration for " + tag.ToString() + " needs >= 2 "
                           "scores in the window, got " +
                           std::to_string(scores.size()));
  }
  const double n = static_cast<double>(scores.size());
  double sum = 0.0;
  for (const double s : scores) sum += s;
  const double mean = sum / n;
  double ss = 0.0;
  for (const double s : scores) ss += (s - mean) * (s - mean);

  ThresholdModel model;
  model.mean = mean;
  model.stddev = std::sqrt(ss / n);
  model.window_days = window_days;
  model.model_tag = tag;
  model.sample_count = scores.size();
  model.degenerate = model.stddev <= 1e-12 * std::max(1.0, std::abs(mean));
  return model;
}

Severity Classify(double score, const ThresholdModel& model) {
  if (model.degenerate) return Severity::kLow;
  const double z = model.Standardize(score);
  if (z > kHighSigma + kBoundaryTolerance) return Severity::kHigh;
  if (z > kMediumSigma + kBoundaryTolerance) return Severity::kMedium;
  return Severity::kLow;
}

void ScoreStore::Upsert(const Entry& entry) {
  entries_[{entry.tag, entry.fingerprint}] = entry;
}

std::vector<double> ScoreStore::Window(const ModelTag& tag, Day first,
                                       Day last) const {
  std::vector<const Entry*> selected;
  for (const auto& [key, entry] : entries_) {
    if (entry.tag == tag && entry.day >= first && entry.day <= last) {
      selected.push_back(&entry);
    }
  }
  std::sort(selected.begin(), selected.end(), [](const Entry* a, const Entry* b) {
    if (a->day != b->day) return a->day < b->day;
    return a->fingerprint < b->fingerprint;
  });
  std::vector<double> scores;
  scores.reserve(selected.size());
  for (const Entry* e : selected) scores.push_back(e->score);
  return scores;
}

std::optional<Day> ScoreStore::LatestDay() const {
  std::optional<Day> latest;
  for (const auto& [key, entry] : entries_) {
    if (!latest || entry.day > *latest) latest = entry.day;
  }
  return latest;
}

void ScoreStore::Write(std::ostream& out) const {
  std::vector<const Entry*> ordered;
  for (const auto& [key, entry] : entries_) ordered.push_back(&entry);
  std::sort(ordered.begin(), ordered.end(), [](const Entry* a, const Entry* b) {
    return std::tie(a->day, a->tag, a->fingerprint) <
           std::tie(b->day, b->tag, b->fingerprint);
  });
  for (const Entry* e : ordered) {
    nlohmann::json j = {{"model", e->tag.ToString()},
                        {"day", FormatDay(e->day)},
                        {"fingerprint", e->fingerprint},
                        {"score", e->score}};
    out << j.dump() << '\n';
  }
}

ScoreStore ScoreStore::Read(std::istream& in) {
  ScoreStore store;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      Entry entry;
      const auto tag = ModelTag::Parse(j.at("model").get<std::string>());
      const auto day = ParseDay(j.at("day").get<std::string>());
      if (!tag || !day) throw DataError("bad model or day");
      entry.tag = *tag;
      entry.day = *day;
      entry.fingerprint = j.at("fingerprint").get<std::uint64_t>();
      entry.score = j.at("score").get<double>();
      store.Upsert(entry);
    } catch (const std::exception& e) {
      throw DataError("score store line " + std::to_string(line_no) + ": " +
                      e.what());
    }
  }
  return store;
}

ThresholdModel Recalibrate(const ScoreStore& history, const ModelTag& tag,
                           Day now, int window_days) {
  if (window_days < 1) throw ConfigError("window_days must be >= 1");
  const Day first = now - std::chrono::days{window_days - 1};
  const auto scores = history.Window(tag, first, now);
  return Calibrate(scores, window_days, tag);
}

std::uint64_t Fingerprint(std::string_view text) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (const unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  return hash;
}

}  // namespace scade
