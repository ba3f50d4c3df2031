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

#include <gtest/gtest.h>

#include <random>
#include <string>
#include <vector>

#include "scade/error.h"
#include "scade/ingest.h"
#include "scade/tokenizer.h"

namespace scade {
namespace {

const std::string kSep(kBigramSeparator);

PayloadItem Payload(std::string text, std::uint64_t ref = 1) {
  PayloadItem p;
  p.event_ref = EventRef{ref};
  p.text = std::move(text);
  p.fields = {p.text};
  return p;
}

TokenizedDoc Doc(std::vector<std::pair<std::string, std::uint32_t>> counts,
                 std::uint64_t ref = 1) {
  TokenizedDoc d;
  d.event_ref = EventRef{ref};
  std::sort(counts.begin(), counts.end());
  for (const auto& [t, n] : counts) d.length += n;
  d.token_counts = std::move(counts);
  return d;
}

TEST(TokenizeTest, Unigrams) {
  const auto d = Tokenize(Payload("a b c"), GramMode::kUnigram);
  EXPECT_EQ(d.token_counts, (TokenCounts{{"a", 1}, {"b", 1}, {"c", 1}}));
  EXPECT_EQ(d.length, 3u);
}

TEST(TokenizeTest, AdjacentBigrams) {
  const auto d = Tokenize(Payload("a b c"), GramMode::kBigram);
  EXPECT_EQ(d.token_counts, (TokenCounts{{"a" + kSep + "b", 1}, {"b" + kSep + "c", 1}}));
  EXPECT_EQ(d.length, 2u);
}

TEST(TokenizeTest, BothIsUnionWithSummedCounts) {
  const auto d = Tokenize(Payload("a a b"), GramMode::kBoth);
  EXPECT_EQ(d.count("a"), 2u);
  EXPECT_EQ(d.count("b"), 1u);
  EXPECT_EQ(d.count("a" + kSep + "a"), 1u);
  EXPECT_EQ(d.count("a" + kSep + "b"), 1u);
  EXPECT_EQ(d.token_counts.size(), 4u);
  EXPECT_EQ(d.length, 5u);
}

TEST(TokenizeTest, SingleTermHasNoBigrams) {
  const auto d = Tokenize(Payload("whoami"), GramMode::kBigram);
  EXPECT_TRUE(d.token_counts.empty());
  EXPECT_EQ(d.length, 0u);
}

TEST(TokenizeTest, EmptyTextIsAnError) {
  EXPECT_THROW(Tokenize(Payload(""), GramMode::kUnigram), Error);
}

TEST(TokenizeTest, PunctuationStaysInsideTokens) {
  const auto d = Tokenize(Payload("certutil.exe -urlcache -split"), GramMode::kUnigram);
  EXPECT_EQ(d.count("-urlcache"), 1u);
  EXPECT_EQ(d.count("certutil.exe"), 1u);
}

TEST(TokenizeTest, CrossFieldPairsAreUnordered) {
  PayloadItem p;
  p.text = "alice web-01 cmd.exe";
  p.fields = {"alice", "web-01", "cmd.exe"};
  const auto d = Tokenize(p, GramMode::kBigram, TokenizeOptions{true});
  const std::string pair_sep(kFieldPairSeparator);
  EXPECT_EQ(d.count("alice" + pair_sep + "web-01"), 1u);
  EXPECT_EQ(d.count("cmd.exe" + pair_sep + "web-01"), 1u);
  EXPECT_EQ(d.count("alice" + pair_sep + "cmd.exe"), 1u);
  EXPECT_EQ(d.length, 2u + 3u);
  // Unigram passes ignore the option.
  EXPECT_EQ(Tokenize(p, GramMode::kUnigram, TokenizeOptions{true}).length, 3u);
}

TEST(TokenizeTest, PropertiesOnRandomText) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    std::string text;
    const int n = 1 + static_cast<int>(rng() % 12);
    for (int i = 0; i < n; ++i) {
      if (i) text += ' ';
      text += static_cast<char>('a' + rng() % 4);
    }
    const auto uni = Tokenize(Payload(text), GramMode::kUnigram);
    const auto bi = Tokenize(Payload(text), GramMode::kBigram);
    const auto both = Tokenize(Payload(text), GramMode::kBoth);
    std::uint64_t sum = 0;
    for (const auto& [t, c] : uni.token_counts) {
      EXPECT_FALSE(t.empty());
      sum += c;
    }
    EXPECT_EQ(sum, uni.length);
    EXPECT_EQ(uni.length, static_cast<std::uint64_t>(n));
    EXPECT_EQ(bi.length, static_cast<std::uint64_t>(n - 1));
    EXPECT_EQ(both.length, uni.length + bi.length);
  }
}

TEST(CorpusModelTest, TwoDocExample) {
  const std::vector<TokenizedDoc> docs = {Doc({{"a", 1}}), Doc({{"a", 2}, {"b", 1}})};
  const auto m = BuildCorpusModel(docs);
  EXPECT_EQ(m.doc_count(), 2u);
  EXPECT_DOUBLE_EQ(m.avg_doc_length(), 2.0);
  const auto a = *m.index_of("a");
  const auto b = *m.index_of("b");
  EXPECT_EQ(m.doc_frequency(a), 2u);
  EXPECT_EQ(m.doc_frequency(b), 1u);
  EXPECT_EQ(m.total_term_frequency(a), 3u);
  EXPECT_EQ(m.total_term_frequency(b), 1u);
  EXPECT_EQ(a, 0u);
  EXPECT_EQ(b, 1u);
}

TEST(CorpusModelTest, SingletonAndDuplicates) {
  const std::vector<TokenizedDoc> one = {Doc({{"x", 1}})};
  const auto m1 = BuildCorpusModel(one);
  EXPECT_EQ(m1.doc_count(), 1u);
  EXPECT_EQ(m1.doc_frequency(0), 1u);
  EXPECT_DOUBLE_EQ(m1.avg_doc_length(), 1.0);

  const std::vector<TokenizedDoc> base = {Doc({{"a", 2}, {"b", 1}})};
  const std::vector<TokenizedDoc> twice = {base[0], base[0]};
  const auto m_base = BuildCorpusModel(base);
  const auto m_twice = BuildCorpusModel(twice);
  for (std::uint32_t i = 0; i < m_base.vocabulary_size(); ++i) {
    EXPECT_EQ(m_twice.doc_frequency(i), 2 * m_base.doc_frequency(i));
    EXPECT_EQ(m_twice.total_term_frequency(i), 2 * m_base.total_term_frequency(i));
  }
}

TEST(CorpusModelTest, EmptyCorpusIsAnError) {
  EXPECT_THROW(BuildCorpusModel(std::vector<TokenizedDoc>{}), Error);
}

std::vector<TokenizedDoc> RandomDocs(std::mt19937_64& rng, int n) {
  std::vector<TokenizedDoc> docs;
  for (int i = 0; i < n; ++i) {
    std::vector<std::pair<std::string, std::uint32_t>> counts;
    for (char c = 'a'; c < 'a' + 8; ++c) {
      if (rng() % 3 == 0) counts.emplace_back(std::string(1, c), 1 + rng() % 3);
    }
    if (counts.empty()) counts.emplace_back("z", 1);
    docs.push_back(Doc(counts, static_cast<std::uint64_t>(i + 1)));
  }
  return docs;
}

TEST(CorpusModelTest, MergeIsAssociativeAndCommutative) {
  std::mt19937_64 rng(5);
  const auto docs = RandomDocs(rng, 30);
  CorpusAccumulator x, y, z;
  for (int i = 0; i < 10; ++i) x.Add(docs[i]);
  for (int i = 10; i < 20; ++i) y.Add(docs[i]);
  for (int i = 20; i < 30; ++i) z.Add(docs[i]);
  CorpusAccumulator left = x;
  left.Merge(y);
  left.Merge(z);
  CorpusAccumulator right = y;
  right.Merge(z);
  CorpusAccumulator right2 = z;
  right2.Merge(x);
  right2.Merge(y);
  CorpusAccumulator yz = y;
  yz.Merge(z);
  CorpusAccumulator assoc = x;
  assoc.Merge(yz);
  EXPECT_EQ(left.Freeze(), assoc.Freeze());
  EXPECT_EQ(left.Freeze(), right2.Freeze());
  EXPECT_EQ(left.Freeze(), BuildCorpusModel(docs, 1));
  EXPECT_EQ(BuildCorpusModel(docs, 1), BuildCorpusModel(docs, 4));
}

TEST(CorpusModelTest, InvariantsAndAddBound) {
  std::mt19937_64 rng(9);
  const auto docs = RandomDocs(rng, 25);
  const auto m = BuildCorpusModel(docs);
  std::uint64_t df_sum = 0;
  for (std::uint32_t i = 0; i < m.vocabulary_size(); ++i) {
    EXPECT_GE(m.doc_frequency(i), 1u);
    EXPECT_LE(m.doc_frequency(i), m.doc_count());
    EXPECT_EQ(*m.index_of(m.token(i)), i);
    df_sum += m.doc_frequency(i);
  }
  auto more = docs;
  more.push_back(RandomDocs(rng, 1)[0]);
  const auto m2 = BuildCorpusModel(more);
  std::uint64_t df_sum2 = 0;
  for (std::uint32_t i = 0; i < m2.vocabulary_size(); ++i) df_sum2 += m2.doc_frequency(i);
  EXPECT_LE(df_sum2 - df_sum, m2.vocabulary_size());
}

TEST(CorpusModelTest, JsonRoundTripIsExact) {
  std::mt19937_64 rng(2);
  auto docs = RandomDocs(rng, 7);  // avg length is not a short decimal
  const auto m = BuildCorpusModel(docs);
  const auto restored = CorpusModel::FromJson(nlohmann::json::parse(m.ToJson().dump()));
  EXPECT_EQ(restored, m);
  EXPECT_EQ(restored.avg_doc_length(), m.avg_doc_length());
}

TEST(CorpusModelTest, FromJsonRejectsInconsistentCounts) {
  const std::vector<TokenizedDoc> docs = {Doc({{"a", 1}})};
  auto j = BuildCorpusModel(docs).ToJson();
  j["vocabulary"][0][1] = 5;  // df > N
  EXPECT_THROW(CorpusModel::FromJson(j), Error);
  auto k = BuildCorpusModel(docs).ToJson();
  k["version"] = 99;
  EXPECT_THROW(CorpusModel::FromJson(k), Error);
}

TEST(VectorizeTest, ProjectsOntoVocabulary) {
  const std::vector<TokenizedDoc> docs = {Doc({{"a", 1}, {"b", 1}})};
  const auto m = BuildCorpusModel(docs);
  EXPECT_EQ(Vectorize(Doc({{"a", 2}}), m).entries,
            (std::vector<std::pair<std::uint32_t, std::uint32_t>>{{0, 2}}));
  EXPECT_EQ(Vectorize(Doc({{"a", 1}, {"b", 3}}), m).entries,
            (std::vector<std::pair<std::uint32_t, std::uint32_t>>{{0, 1}, {1, 3}}));
  const auto unseen = Vectorize(Doc({{"q", 2}, {"r", 1}}), m);
  EXPECT_TRUE(unseen.entries.empty());
  EXPECT_EQ(unseen.oov, 3u);
}

TEST(VectorizeTest, CountsPlusOovEqualLength) {
  std::mt19937_64 rng(4);
  const auto train = RandomDocs(rng, 10);
  const auto m = BuildCorpusModel(train);
  for (const auto& d : RandomDocs(rng, 50)) {
    const auto v = Vectorize(d, m);
    std::uint64_t sum = v.oov;
    for (const auto& [i, c] : v.entries) sum += c;
    EXPECT_EQ(sum, d.length);
  }
}

}  // namespace
}  // namespace scade
