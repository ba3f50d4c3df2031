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

#ifndef SCADE_SCORING_H_
#define SCADE_SCORING_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "scade/event.h"
#include "scade/tokenizer.h"

namespace scade {

// BM25 parameters: k is term-frequency saturation, b is length
// normalization strength.
struct ScoringParams {
  double k = 1.5;
  double b = 0.75;

  // Throws a config error unless k >= 0 and 0 <= b <= 1.
  void Validate() const;
};

// Saturating BM25 term frequency:
//   f (k + 1) / (f + k (1 - b + b |d| / avgdl))
double TfScore(std::uint64_t f_td, std::uint64_t doc_len,
               const ScoringParams& params, double avg_dl);

// Smoothed inverse document frequency, natural log:
//   ln((N - n + 0.5) / (n + 0.5) + 1)
double IdfScore(std::uint64_t n_t, std::uint64_t n_docs);

// Log-entropy weight, natural log:
//   1 + (f_td / sum_f_t) ln(D / (1 + f_t))
// where sum_f_t is the corpus-wide occurrence total and f_t the number of
// documents containing the token.
double LogEntropyWeight(std::uint64_t f_td, std::uint64_t sum_f_t,
                        std::uint64_t f_t, std::uint64_t n_docs);

struct TokenAttribution {
  std::string token;
  double bm25 = 0.0;
  double log_entropy = 0.0;

  double combined() const { return bm25 + log_entropy; }
};

struct ScoreRecord {
  EventRef event_ref;
  GramMode gram_mode = GramMode::kUnigram;
  double bm25_score = 0.0;
  double log_entropy_score = 0.0;
  // One entry per distinct token, ordered by token.
  std::vector<TokenAttribution> token_attributions;

  // Highest combined contributions first; ties broken by token.
  std::vector<TokenAttribution> TopAttributions(std::size_t n) const;
};

// Both throw a data error if a token of `doc` is missing from `model`.
// BM25 fills bm25_score and the bm25 part of each attribution; the
// log-entropy variant fills the other half.
ScoreRecord Bm25Score(const TokenizedDoc& doc, const CorpusModel& model,
                      const ScoringParams& params, GramMode gram_mode);
ScoreRecord LogEntropyScore(const TokenizedDoc& doc, const CorpusModel& model,
                            GramMode gram_mode);

// Both halves in one pass over the document.
ScoreRecord ScoreDocument(const TokenizedDoc& doc, const CorpusModel& model,
                          const ScoringParams& params, GramMode gram_mode);

// Scores every document against a frozen model; results are per-document
// and independent of the thread count.
std::vector<ScoreRecord> ScoreCorpus(std::span<const TokenizedDoc> docs,
                                     const CorpusModel& model,
                                     const ScoringParams& params,
                                     GramMode gram_mode, std::size_t threads = 1);

}  // namespace scade

#endif  // SCADE_SCORING_H_
