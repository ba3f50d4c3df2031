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

#ifndef SCADE_TOKENIZER_H_
#define SCADE_TOKENIZER_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"
#include "scade/event.h"
#include "scade/ingest.h"

namespace scade {

enum class GramMode { kUnigram, kBigram, kBoth };

std::string_view ToString(GramMode mode);
std::optional<GramMode> ParseGramMode(std::string_view name);

struct TokenizeOptions {
  // Also emit every unordered pair of attribute values (bigram passes only).
  bool cross_field_pairs = false;
};

// f(t,d) for one payload, sorted by token so iteration order is fixed.
using TokenCounts = std::vector<std::pair<std::string, std::uint32_t>>;

struct TokenizedDoc {
  EventRef event_ref;
  TokenCounts token_counts;
  std::uint64_t length = 0;  // |d|

  // Count of `token`, 0 if absent.
  std::uint32_t count(std::string_view token) const;
};

// Unigrams are whitespace-split terms. Bigrams are adjacent ordered pairs
// joined by kBigramSeparator. kBoth is the union with summed counts.
TokenizedDoc Tokenize(const PayloadItem& payload, GramMode mode,
                      const TokenizeOptions& options = {});

// Frozen corpus statistics with a dense, lexicographically ordered
// vocabulary.
class CorpusModel {
 public:
  std::uint64_t doc_count() const { return doc_count_; }
  std::uint64_t total_length() const { return total_length_; }
  double avg_doc_length() const { return avg_doc_length_; }
  std::size_t vocabulary_size() const { return tokens_.size(); }

  std::optional<std::uint32_t> index_of(std::string_view token) const;
  const std::string& token(std::uint32_t index) const { return tokens_[index]; }
  // n(t): documents containing the token. Also f(t) in the log-entropy weight.
  std::uint64_t doc_frequency(std::uint32_t index) const {
    return doc_frequency_[index];
  }
  // Sum over documents of f(t,d).
  std::uint64_t total_term_frequency(std::uint32_t index) const {
    return term_total_[index];
  }

  nlohmann::json ToJson() const;
  // Throws a data error for unknown versions or inconsistent counts.
  static CorpusModel FromJson(const nlohmann::json& j);

  friend bool operator==(const CorpusModel& a, const CorpusModel& b) {
    return a.doc_count_ == b.doc_count_ && a.total_length_ == b.total_length_ &&
           a.avg_doc_length_ == b.avg_doc_length_ && a.tokens_ == b.tokens_ &&
           a.doc_frequency_ == b.doc_frequency_ && a.term_total_ == b.term_total_;
  }

 private:
  friend class CorpusAccumulator;
  void BuildIndex();

  std::uint64_t doc_count_ = 0;
  std::uint64_t total_length_ = 0;
  double avg_doc_length_ = 0.0;
  std::vector<std::string> tokens_;
  std::vector<std::uint64_t> doc_frequency_;
  std::vector<std::uint64_t> term_total_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

// Mergeable partial statistics. Merging is associative and commutative.
class CorpusAccumulator {
 public:
  void Add(const TokenizedDoc& doc);
  void Merge(const CorpusAccumulator& other);
  std::uint64_t doc_count() const { return doc_count_; }
  // Throws a data error for an empty corpus.
  CorpusModel Freeze() const;

 private:
  struct Stats {
    std::uint64_t doc_frequency = 0;
    std::uint64_t term_total = 0;
  };
  std::uint64_t doc_count_ = 0;
  std::uint64_t total_length_ = 0;
  std::unordered_map<std::string, Stats> stats_;
};

CorpusModel BuildCorpusModel(std::span<const TokenizedDoc> docs,
                             std::size_t threads = 1);

struct SparseVector {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> entries;  // by index
  std::uint64_t oov = 0;  // occurrences of tokens missing from the model
};

SparseVector Vectorize(const TokenizedDoc& doc, const CorpusModel& model);

}  // namespace scade

#endif  // SCADE_TOKENIZER_H_
