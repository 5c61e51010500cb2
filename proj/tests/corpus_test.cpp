// corpus_test.cpp
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Copyright 2026 The simlm Authors.

#include <algorithm>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "test_util.hpp"

namespace simlm {
namespace {

using testing::corpus_from;
using testing::random_corpus;

void expect_marginals_consistent(const PairCorpus& c) {
  Count total = 0;
  std::vector<Count> rows(c.nouns().size(), 0), cols(c.verbs().size(), 0);
  for (const auto& t : c.triples()) {
    EXPECT_GT(t.count, 0u);
    rows[t.noun] += t.count;
    cols[t.verb] += t.count;
    total += t.count;
  }
  for (WordId n = 0; n < rows.size(); ++n) EXPECT_EQ(c.row_total(n), rows[n]);
  for (WordId v = 0; v < cols.size(); ++v) EXPECT_EQ(c.col_total(v), cols[v]);
  EXPECT_EQ(c.total(), total);
}

TEST(Vocabulary, InternIsStableAndBijective) {
  Vocabulary v;
  EXPECT_EQ(v.intern("a"), 0u);
  EXPECT_EQ(v.intern("b"), 1u);
  EXPECT_EQ(v.intern("a"), 0u);
  EXPECT_EQ(v.size(), 2u);
  EXPECT_EQ(v.word(1), "b");
  EXPECT_EQ(v.at("b"), 1u);
  EXPECT_FALSE(v.find("c").has_value());
  EXPECT_THROW(v.at("c"), LookupError);
}

TEST(ParsePairs, AccumulatesRepeatedLines) {
  const auto c = corpus_from("plans\tmake\nplans\tmake\naction\ttake\t3\n");
  const auto plans = c.nouns().at("plans"), action = c.nouns().at("action");
  const auto make = c.verbs().at("make"), take = c.verbs().at("take");
  EXPECT_EQ(c.count(plans, make), 2u);
  EXPECT_EQ(c.count(action, take), 3u);
  EXPECT_EQ(c.total(), 5u);
  EXPECT_EQ(plans, 0u);
  EXPECT_EQ(action, 1u);
  expect_marginals_consistent(c);
}

TEST(ParsePairs, ZeroCountIsRejectedWithLineNumber) {
  try {
    corpus_from("plans\tmake\t0\n");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1u);
  }
}

TEST(ParsePairs, MalformedLinesReportTheirLine) {
  for (const std::string bad : {"a\tb\nonlyone\n", "a\tb\nx\ty\tz\n", "a\tb\nx\ty\t-3\n", "a\tb\nx\ty\t2\t9\n"}) {
    try {
      corpus_from(bad);
      FAIL() << "accepted: " << bad;
    } catch (const ParseError& e) {
      EXPECT_EQ(e.line(), 2u);
    }
  }
}

TEST(ParsePairs, EmptyStreamGivesEmptyCorpus) {
  const auto c = corpus_from("");
  EXPECT_EQ(c.total(), 0u);
  EXPECT_TRUE(c.nouns().empty());
  EXPECT_TRUE(c.verbs().empty());
}

TEST(ParsePairs, BlankLinesAndCrlfAreTolerated) {
  const auto c = corpus_from("a\tx\r\n\n\na\ty\t2\r\n");
  EXPECT_EQ(c.total(), 3u);
  EXPECT_EQ(c.verbs().size(), 2u);
}

TEST(Snapshot, RoundTripIsExact) {
  const auto c = random_corpus(7, 30, 20, 200);
  std::stringstream buf;
  write_snapshot(buf, c);
  const auto back = read_snapshot(buf);
  EXPECT_TRUE(back == c);
  EXPECT_TRUE(back.nouns() == c.nouns());
}

TEST(Snapshot, TruncatedInputIsAParseError) {
  const auto c = random_corpus(8, 5, 5, 20);
  std::stringstream buf;
  write_snapshot(buf, c);
  std::string s = buf.str();
  std::istringstream cut(s.substr(0, s.size() / 2));
  EXPECT_THROW(read_snapshot(cut), ParseError);
}

TEST(StripSingletons, RemovesCountOnePairs) {
  const auto c = corpus_from("a\tx\t1\na\ty\t2\n");
  const auto s = strip_singletons(c);
  EXPECT_EQ(s.total(), 2u);
  EXPECT_EQ(s.count(0, 0), 0u);
  EXPECT_EQ(s.count(0, 1), 2u);
  EXPECT_EQ(s.verbs().size(), 2u);  // vocabulary kept
  expect_marginals_consistent(s);
}

TEST(StripSingletons, NoSingletonsIsIdentity) {
  const auto c = corpus_from("a\tx\t2\nb\ty\t5\n");
  EXPECT_TRUE(strip_singletons(c) == c);
}

TEST(StripSingletons, IdempotentAndTotalsAddUp) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto c = random_corpus(seed, 40, 30, 300);
    const auto s = strip_singletons(c);
    EXPECT_EQ(c.total(), s.total() + c.singleton_count());
    EXPECT_TRUE(strip_singletons(s) == s);
    EXPECT_EQ(s.singleton_count(), 0u);
    expect_marginals_consistent(s);
  }
}

TEST(StripSingletons, PublishedCorpusSizesAreConsistent) {
  // With singletons 587833 pairs, of which 82407 singleton tokens; without
  // singletons 505426 pairs.
  constexpr Count with = 587833, singletons = 82407, without = 505426;
  EXPECT_EQ(with - singletons, without);
}

TEST(Split, SingleTypeCannotStraddle) {
  const auto c = corpus_from("a\tx\t10\n");
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = split_unseen_test(c, {0.8, 5, seed});
    EXPECT_TRUE(s.test.empty());
    EXPECT_EQ(s.train.total(), 8u);
    EXPECT_EQ(s.discarded_seen, 2u);
  }
}

TEST(Split, EightyOfHundredAndDisjointTypes) {
  // 100 occurrences over 20 types.
  PairCorpusBuilder b;
  for (int t = 0; t < 20; ++t) b.add("n" + std::to_string(t % 7), "v" + std::to_string(t), 5);
  const auto c = b.build();
  ASSERT_EQ(c.total(), 100u);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto s = split_unseen_test(c, {0.8, 5, seed});
    EXPECT_EQ(s.train.total(), 80u);
    EXPECT_EQ(s.test.size() + s.discarded_seen, 20u);
    for (const auto& o : s.test) EXPECT_EQ(s.train.count(o.noun, o.verb), 0u);
    // Train counts never exceed the original.
    for (const auto& t : s.train.triples()) EXPECT_LE(t.count, c.count(t.noun, t.verb));
    EXPECT_TRUE(s.train.nouns() == c.nouns());
  }
}

TEST(Split, DeterministicGivenSeed) {
  const auto c = random_corpus(3, 50, 40, 400);
  const auto a = split_unseen_test(c, {0.8, 5, 42});
  const auto b = split_unseen_test(c, {0.8, 5, 42});
  EXPECT_TRUE(a.train == b.train);
  ASSERT_EQ(a.test.size(), b.test.size());
  for (std::size_t i = 0; i < a.test.size(); ++i) {
    EXPECT_EQ(a.test[i].noun, b.test[i].noun);
    EXPECT_EQ(a.test[i].verb, b.test[i].verb);
  }
  const auto d = split_unseen_test(c, {0.8, 5, 43});
  EXPECT_FALSE(d.train == a.train);
}

TEST(Split, BadFractionIsAConfigError) {
  const auto c = corpus_from("a\tx\t10\n");
  EXPECT_THROW(split_unseen_test(c, {0.0, 5, 0}), ConfigError);
  EXPECT_THROW(split_unseen_test(c, {1.0, 5, 0}), ConfigError);
  EXPECT_THROW(split_unseen_test(c, {0.8, 1, 0}), ConfigError);
  EXPECT_THROW(split_unseen_test(corpus_from(""), {0.8, 5, 0}), ConfigError);
}

TEST(Folds, TenIntoFive) {
  std::vector<int> items(10);
  std::iota(items.begin(), items.end(), 0);
  const auto folds = make_folds(items, 5, 1);
  ASSERT_EQ(folds.size(), 5u);
  for (const auto& f : folds) EXPECT_EQ(f.size(), 2u);
}

TEST(Folds, RemainderGoesToLowestFolds) {
  std::vector<int> items(11);
  std::iota(items.begin(), items.end(), 0);
  const auto folds = make_folds(items, 5, 1);
  std::vector<std::size_t> sizes;
  for (const auto& f : folds) sizes.push_back(f.size());
  EXPECT_EQ(sizes, (std::vector<std::size_t>{3, 2, 2, 2, 2}));
}

TEST(Folds, PartitionAndDeterminism) {
  std::vector<int> items(103);
  std::iota(items.begin(), items.end(), 0);
  const auto folds = make_folds(items, 5, 9);
  std::multiset<int> seen;
  for (const auto& f : folds) seen.insert(f.begin(), f.end());
  EXPECT_EQ(seen, std::multiset<int>(items.begin(), items.end()));
  EXPECT_EQ(folds, make_folds(items, 5, 9));
  EXPECT_NE(folds, make_folds(items, 5, 10));
}

TEST(Folds, TooFewItemsIsAConfigError) {
  std::vector<int> items(3);
  EXPECT_THROW(make_folds(items, 5, 0), ConfigError);
  EXPECT_THROW(make_folds(items, 1, 0), ConfigError);
}

}  // namespace
}  // namespace simlm
