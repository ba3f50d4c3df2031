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

#include "scade/tokenizer.h"

#include <algorithm>
#include <map>

#include "scade/error.h"
#include "scade/parallel.h"

namespace scade {
namespace {

constexpr std::string_view kModelFormat = "scade-corpus-model";
constexpr int kModelVersion = 1;

std::vector<std::string_view> SplitWhitespace(std::string_view text) {
  std::vector<std::string_view> terms;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t start = text.find_first_not_of(" \t\r\n\v\f", pos);
    if (start == std::string_view::npos) break;
    std::size_t end = text.find_first_of(" \t\r\n\v\f", start);
    if (end == std::string_view::npos) end = text.size();
    terms.push_back(text.substr(start, end - start));
    pos = end;
  }
  return terms;
}

std::string Join(std::string_view a, std::string_view sep, std::string_view b) {
  std::string out;
  out.reserve(a.size() + sep.size() + b.size());
  out.append(a).append(sep).append(b);
  return out;
}

}  // namespace

std::string_view ToString(GramMode mode) {
  switch (mode) {
    case GramMode::kUnigram:
      return "unigram";
    case GramMode::kBigram:
      return "bigram";
    case GramMode::kBoth:
      return "both";
  }
  return "unigram";
}

std::optional<GramMode> ParseGramMode(std::string_view name) {
  if (name == "unigram") return GramMode::kUnigram;
  if (name == "bigram") return GramMode::kBigram;
  if (name == "both") return GramMode::kBoth;
  return std::nullopt;
}

std::uint32_t TokenizedDoc::count(std::string_view token) const {
  const auto it = std::lower_bound(
      token_counts.begin(), token_counts.end(), token,
      [](const auto& entry, std::string_view t) { return entry.first < t; });
  if (it == token_counts.end() || it->first != token) return 0;
  return it->second;
}

TokenizedDoc Tokenize(const PayloadItem& payload, GramMode mode,
                      const TokenizeOptions& options) {
  const auto terms = SplitWhitespace(payload.text);
  if (terms.empty()) {
    throw DataError("cannot tokenize empty payload for record " +
                    std::to_string(payload.event_ref.value));
  }
  std::map<std::string, std::uint32_t, std::less<>> counts;
  const bool unigrams = mode != GramMode::kBigram;
  const bool bigrams = mode != GramMode::kUnigram;
  if (unigrams) {
    for (const auto term : terms) ++counts[std::string(term)];
  }
  if (bigrams) {
    for (std::size_t i = 1; i < terms.size(); ++i) {
      ++counts[Join(terms[i - 1], kBigramSeparator, terms[i])];
    }
    if (options.cross_field_pairs) {
      const auto& fields = payload.fields;
      for (std::size_t i = 0; i < fields.size(); ++i) {
        for (std::size_t j = i + 1; j < fields.size(); ++j) {
          const auto& lo = std::min(fields[i], fields[j]);
          const auto& hi = std::max(fields[i], fields[j]);
          ++counts[Join(lo, kFieldPairSeparator, hi)];
        }
      }
    }
  }

  TokenizedDoc doc;
  doc.event_ref = payload.event_ref;
  doc.token_counts.reserve(counts.size());
  for (auto& [token, n] : counts) {
    doc.length += n;
    doc.token_counts.emplace_back(token, n);
  }
  return doc;
}

std::optional<std::uint32_t> CorpusModel::index_of(std::string_view token) const {
  const auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void CorpusModel::BuildIndex() {
  index_.clear();
  index_.reserve(tokens_.size());
  for (std::uint32_t i = 0; i < tokens_.size(); ++i) index_.emplace(tokens_[i], i);
}

nlohmann::json CorpusModel::ToJson() const {
  nlohmann::json vocab = nlohmann::json::array();
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    vocab.push_back({tokens_[i], doc_frequency_[i], term_total_[i]});
  }
  return {
      {"format", kModelFormat},
      {"version", kModelVersion},
      {"doc_count", doc_count_},
      {"total_length", total_length_},
      {"avg_doc_length", avg_doc_length_},
      {"vocabulary", std::move(vocab)},
  };
}

CorpusModel CorpusModel::FromJson(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != kModelFormat) {
      throw DataError("not a corpus model artifact");
    }
    if (j.at("version").get<int>() != kModelVersion) {
      throw DataError("unsupported corpus model version " +
                      j.at("version").dump());
    }
    CorpusModel model;
    model.doc_count_ = j.at("doc_count").get<std::uint64_t>();
    model.total_length_ = j.at("total_length").get<std::uint64_t>();
    model.avg_doc_length_ = j.at("avg_doc_length").get<double>();
    for (const auto& entry : j.at("vocabulary")) {
      model.tokens_.push_back(entry.at(0).get<std::string>());
      model.doc_frequency_.push_back(entry.at(1).get<std::uint64_t>());
      model.term_total_.push_back(entry.at(2).get<std::uint64_t>());
    }
    if (model.doc_count_ == 0 ||
        model.avg_doc_length_ != static_cast<double>(model.total_length_) /
                                     static_cast<double>(model.doc_count_)) {
      throw DataError("corpus model: inconsistent document statistics");
    }
    for (std::size_t i = 0; i < model.tokens_.size(); ++i) {
      if (i > 0 && !(model.tokens_[i - 1] < model.tokens_[i])) {
        throw DataError("corpus model: vocabulary is not strictly ordered");
      }
      if (model.doc_frequency_[i] == 0 ||
          model.doc_frequency_[i] > model.doc_count_ ||
          model.term_total_[i] < model.doc_frequency_[i]) {
        throw DataError("corpus model: inconsistent counts for token " +
                        model.tokens_[i]);
      }
    }
    model.BuildIndex();
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("corpus model: ") + e.what());
  }
}

void CorpusAccumulator::Add(const TokenizedDoc& doc) {
  ++doc_count_;
  total_length_ += doc.length;
  for (const auto& [token, n] : doc.token_counts) {
    if (n == 0) continue;
    Stats& s = stats_[token];
    ++s.doc_frequency;
    s.term_total += n;
  }
}

void CorpusAccumulator::Merge(const CorpusAccumulator& other) {
  doc_count_ += other.doc_count_;
  total_length_ += other.total_length_;
  for (const auto& [token, s] : other.stats_) {
    Stats& mine = stats_[token];
    mine.doc_frequency += s.doc_frequency;
    mine.term_total += s.term_total;
  }
}

CorpusModel CorpusAccumulator::Freeze() const {
  if (doc_count_ == 0) throw DataError("cannot build a corpus model from zero documents");
  CorpusModel model;
  model.doc_count_ = doc_count_;
  model.total_length_ = total_length_;
  model.avg_doc_length_ =
      static_cast<double>(total_length_) / static_cast<double>(doc_count_);
  model.tokens_.reserve(stats_.size());
  for (const auto& entry : stats_) model.tokens_.push_back(entry.first);
  std::sort(model.tokens_.begin(), model.tokens_.end());
  model.doc_frequency_.reserve(model.tokens_.size());
  model.term_total_.reserve(model.tokens_.size());
  for (const auto& token : model.tokens_) {
    const Stats& s = stats_.at(token);
    model.doc_frequency_.push_back(s.doc_frequency);
    model.term_total_.push_back(s.term_total);
  }
  model.BuildIndex();
  return model;
}

CorpusModel BuildCorpusModel(std::span<const TokenizedDoc> docs,
                             std::size_t threads) {
  if (docs.empty()) throw DataError("cannot build a corpus model from zero documents");
  threads = std::min(ResolveThreads(threads), docs.size());
  std::vector<CorpusAccumulator> partials(threads);
  const std::size_t chunk = (docs.size() + threads - 1) / threads;
  ParallelFor(threads, threads, [&](std::size_t t) {
    const std::size_t end = std::min(docs.size(), (t + 1) * chunk);
    for (std::size_t i = t * chunk; i < end; ++i) partials[t].Add(docs[i]);
  });
  CorpusAccumulator total;
  for (const auto& partial : partials) total.Merge(partial);
  return total.Freeze();
}

SparseVector Vectorize(const TokenizedDoc& doc, const CorpusModel& model) {
  SparseVector vec;
  for (const auto& [token, n] : doc.token_counts) {
    if (const auto index = model.index_of(token)) {
      vec.entries.emplace_back(*index, n);
    } else {
      vec.oov += n;
    }
  }
  std::sort(vec.entries.begin(), vec.entries.end());
  return vec;
}

}  // namespace scade
