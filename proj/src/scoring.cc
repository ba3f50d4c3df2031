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

#include "scade/scoring.h"

#include <algorithm>
#include <cmath>

#include "scade/error.h"
#include "scade/parallel.h"

namespace scade {
namespace {

enum Parts : unsigned { kBm25 = 1u, kLogEntropy = 2u };

ScoreRecord Score(const TokenizedDoc& doc, const CorpusModel& model,
                  const ScoringParams& params, GramMode gram_mode,
                  unsigned parts) {
  ScoreRecord record;
  record.event_ref = doc.event_ref;
  record.gram_mode = gram_mode;
  record.token_attributions.reserve(doc.token_counts.size());
  for (const auto& [token, f_td] : doc.token_counts) {
    const auto index = model.index_of(token);
    if (!index) {
      throw DataError("record " + std::to_string(doc.event_ref.value) +
                      ": token '" + token + "' missing from corpus model");
    }
    TokenAttribution attribution{token, 0.0, 0.0};
    const std::uint64_t n_t = model.doc_frequency(*index);
    if (parts & kBm25) {
      attribution.bm25 = IdfScore(n_t, model.doc_count()) *
                         TfScore(f_td, doc.length, params, model.avg_doc_length());
      record.bm25_score += attribution.bm25;
    }
    if (parts & kLogEntropy) {
      attribution.log_entropy =
          LogEntropyWeight(f_td, model.total_term_frequency(*index), n_t,
                           model.doc_count());
      record.log_entropy_score += attribution.log_entropy;
    }
    record.token_attributions.push_back(std::move(attribution));
  }
  return record;
}

}  // namespace

void ScoringParams::Validate() const {
  if (!(k >= 0.0) || !std::isfinite(k)) {
    throw ConfigError("BM25 k must be a finite value >= 0");
  }
  if (!(b >= 0.0 && b <= 1.0)) throw ConfigError("BM25 b must lie in [0, 1]");
}

double TfScore(std::uint64_t f_td, std::uint64_t doc_len,
               const ScoringParams& params, double avg_dl) {
  if (!(avg_dl > 0.0)) throw ConfigError("average document length must be > 0");
  if (doc_len == 0) throw ConfigError("document length must be >= 1");
  const double f = static_cast<double>(f_td);
  const double norm =
      1.0 - params.b + params.b * static_cast<double>(doc_len) / avg_dl;
  const double denom = f + params.k * norm;
  if (denom == 0.0) return 0.0;  // f = 0 and k = 0
  return f * (params.k + 1.0) / denom;
}

double IdfScore(std::uint64_t n_t, std::uint64_t n_docs) {
  if (n_t == 0 || n_t > n_docs) {
    throw DataError("corpus consistency: document frequency " +
                    std::to_string(n_t) + " outside [1, " +
                    std::to_string(n_docs) + "]");
  }
  const double n = static_cast<double>(n_t);
  const double total = static_cast<double>(n_docs);
  return std::log((total - n + 0.5) / (n + 0.5) + 1.0);
}

double LogEntropyWeight(std::uint64_t f_td, std::uint64_t sum_f_t,
                        std::uint64_t f_t, std::uint64_t n_docs) {
  if (sum_f_t == 0) throw DataError("corpus consistency: zero term total");
  if (f_t == 0 || f_t > n_docs || f_td > sum_f_t) {
    throw DataError("corpus consistency: invalid log-entropy inputs");
  }
  return 1.0 + (static_cast<double>(f_td) / static_cast<double>(sum_f_t)) *
                   std::log(static_cast<double>(n_docs) /
                            (1.0 + static_cast<double>(f_t)));
}

std::vector<TokenAttribution> ScoreRecord::TopAttributions(std::size_t n) const {
  std::vector<TokenAttribution> top = token_attributions;
  std::stable_sort(top.begin(), top.end(), [](const auto& a, const auto& b) {
    if (a.combined() != b.combined()) return a.combined() > b.combined();
    return a.token < b.token;
  });
  if (top.size() > n) top.resize(n);
  return top;
}

ScoreRecord Bm25Score(const TokenizedDoc& doc, const CorpusModel& model,
                      const ScoringParams& params, GramMode gram_mode) {
  return Score(doc, model, params, gram_mode, kBm25);
}

ScoreRecord LogEntropyScore(const TokenizedDoc& doc, const CorpusModel& model,
                            GramMode gram_mode) {
  return Score(doc, model, ScoringParams{}, gram_mode, kLogEntropy);
}

ScoreRecord ScoreDocument(const TokenizedDoc& doc, const CorpusModel& model,
                          const ScoringParams& params, GramMode gram_mode) {
  return Score(doc, model, params, gram_mode, kBm25 | kLogEntropy);
}

std::vector<ScoreRecord> ScoreCorpus(std::span<const TokenizedDoc> docs,
                                     const CorpusModel& model,
                                     const ScoringParams& params,
                                     GramMode gram_mode, std::size_t threads) {
  params.Validate();
  std::vector<ScoreRecord> records(docs.size());
  ParallelFor(docs.size(), threads, [&](std::size_t i) {
    records[i] = ScoreDocument(docs[i], model, params, gram_mode);
  });
  return records;
}

}  // namespace scade
