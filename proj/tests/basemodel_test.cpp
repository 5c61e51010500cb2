// basemodel_test.cpp
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

#include <gtest/gtest.h>

#include "test_util.hpp"

namespace simlm {
namespace {

using testing::corpus_from;
using testing::ptr;
using testing::random_corpus;

TEST(Mle, RatioOfCounts) {
  const auto c = ptr(corpus_from("a\tx\t2\na\ty\t2\nb\tz\t1\n"));
  MleModel m(c);
  EXPECT_EQ(m.prob(0, 0), 0.5);
  EXPECT_EQ(m.prob(0, 2), 0.0);  // unseen pair
  EXPECT_EQ(m.unigram(0), 2.0 / 5.0);
}

TEST(Mle, UnigramExample) {
  const auto c = ptr(corpus_from("a\tx\t2\nb\tx\t1\nb\ty\t1\n"));
  EXPECT_EQ(MleModel(c).unigram(c->verbs().at("x")), 0.75);
}

TEST(Mle, UndefinedAndUnknownRows) {
  auto c = ptr(strip_singletons(corpus_from("a\tx\t2\nb\ty\t1\n")));
  MleModel m(c);
  EXPECT_FALSE(m.defined(1));
  EXPECT_THROW(m.prob(1, 0), UndefinedConditionalError);
  EXPECT_THROW(m.prob(7, 0), LookupError);
}

TEST(Mle, RowsSumToOne) {
  const auto c = ptr(random_corpus(11, 12, 15, 50));
  MleModel fwd(c), rev(c, Direction::Reverse);
  for (WordId n = 0; n < c->nouns().size(); ++n) {
    double s = 0.0;
    for (WordId v = 0; v < c->verbs().size(); ++v) s += fwd.prob(n, v);
    EXPECT_NEAR(s, 1.0, 1e-15);
    EXPECT_NEAR(fwd.row(n).mass(), 1.0, 1e-15);
  }
  for (WordId v = 0; v < c->verbs().size(); ++v) {
    double s = 0.0;
    for (WordId n = 0; n < c->nouns().size(); ++n) s += rev.prob(v, n);
    EXPECT_NEAR(s, 1.0, 1e-15);
  }
  double u = 0.0;
  for (WordId v = 0; v < c->verbs().size(); ++v) u += fwd.unigram(v);
  EXPECT_NEAR(u, 1.0, 1e-10);
}

TEST(Mle, UnigramFollowsStrippedTotals) {
  const auto full = corpus_from("a\tx\t1\na\ty\t3\nb\tx\t2\nb\tz\t1\n");
  const auto s = ptr(strip_singletons(full));
  MleModel m(s);
  // Recomputed by hand: remaining pairs (a,y):3, (b,x):2.
  EXPECT_DOUBLE_EQ(m.unigram(s->verbs().at("x")), 2.0 / 5.0);
  EXPECT_DOUBLE_EQ(m.unigram(s->verbs().at("y")), 3.0 / 5.0);
  EXPECT_EQ(m.unigram(s->verbs().at("z")), 0.0);
}

TEST(Katz, GoodTuringCountFromCountOfCounts) {
  // Pair counts 1, 1, 1, 2: n_1 = 3, n_2 = 1.
  const auto c = ptr(corpus_from("a\tw\t1\na\tx\t1\nb\ty\t1\nb\tz\t2\n"));
  const auto k = KatzModel::build(c);
  ASSERT_TRUE(k.good_turing_count(1).has_value());
  EXPECT_DOUBLE_EQ(*k.good_turing_count(1), 2.0 / 3.0);
  EXPECT_EQ(KatzModel::count_of_counts(*c)[1], 3u);
  EXPECT_EQ(KatzModel::count_of_counts(*c)[2], 1u);
}

TEST(Katz, DiscountFormulaMatchesHandComputation) {
  // n_1..n_4 = 100, 30, 15, 8 on distinct cells.
  PairCorpusBuilder b;
  std::size_t cell = 0;
  for (auto [r, types] : {std::pair<Count, int>{1, 100}, {2, 30}, {3, 15}, {4, 8}}) {
    for (int i = 0; i < types; ++i, ++cell) {
      b.add("n" + std::to_string(cell % 20), "v" + std::to_string(cell / 20), r);
    }
  }
  const auto c = ptr(b.build());
  const auto k = KatzModel::build(c, {3, std::nullopt});
  ASSERT_EQ(k.cutoff(), 3u);
  const auto& n = k.count_of_counts();
  const double mu = 4.0 * static_cast<double>(n[4]) / static_cast<double>(n[1]);
  for (Count r = 1; r <= 3; ++r) {
    const double rstar = static_cast<double>(r + 1) * static_cast<double>(n[r + 1]) / static_cast<double>(n[r]);
    EXPECT_NEAR(k.discount(r), (rstar / static_cast<double>(r) - mu) / (1.0 - mu), 1e-15);
  }
  EXPECT_EQ(k.discount(4), 1.0);
}

void expect_katz_contract(const CorpusPtr& c, const KatzModel& k) {
  for (WordId n = 0; n < c->nouns().size(); ++n) {
    if (!k.defined(n)) {
      EXPECT_THROW(k.prob(n, 0), UndefinedConditionalError);
      continue;
    }
    double s = 0.0;
    for (WordId v = 0; v < c->verbs().size(); ++v) {
      const double p = k.prob(n, v);
      s += p;
      if (c->col_total(v) > 0) EXPECT_GT(p, 0.0) << "noun " << n << " verb " << v;
      if (!k.seen(n, v)) EXPECT_DOUBLE_EQ(p, k.alpha(n) * k.unigram(v));
    }
    EXPECT_NEAR(s, 1.0, 1e-8);
    EXPECT_NEAR(k.row(n).mass(), 1.0, 1e-8);
  }
}

TEST(Katz, RowsNormalizeAndArePositive) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto c = ptr(random_corpus(seed, 25, 30, 120 + 10 * seed));
    expect_katz_contract(c, KatzModel::build(c));
  }
}

TEST(Katz, SingletonFreeModelWithFullCountOfCounts) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto full = random_corpus(seed, 25, 30, 200);
    auto s = ptr(strip_singletons(full));
    KatzOptions opts;
    opts.count_of_counts = KatzModel::count_of_counts(full);
    expect_katz_contract(s, KatzModel::build(s, opts));
  }
}

TEST(Katz, EqualFrequencyUnseenVerbsGetEqualProbability) {
  const auto c = ptr(corpus_from("a\tx\t3\nb\ty\t2\nb\tz\t2\nc\tx\t1\nc\tw\t1\n"));
  const auto k = KatzModel::build(c);
  const auto a = c->nouns().at("a");
  const auto y = c->verbs().at("y"), z = c->verbs().at("z");
  ASSERT_EQ(c->col_total(y), c->col_total(z));
  EXPECT_EQ(k.prob(a, y), k.prob(a, z));
}

TEST(Katz, SeenPairsAreDiscountedWhenCountOfCountsDecreases) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto c = ptr(random_corpus(seed, 60, 40, 900));
    const auto k = KatzModel::build(c);
    const auto& n = k.count_of_counts();
    bool decreasing = true;
    for (Count r = 1; r <= k.cutoff(); ++r) decreasing = decreasing && n[r + 1] < n[r];
    if (!decreasing) continue;
    MleModel mle(c);
    for (const auto& t : c->triples()) {
      if (t.count <= k.cutoff()) EXPECT_LE(k.prob(t.noun, t.verb), mle.prob(t.noun, t.verb));
    }
  }
}

TEST(Katz, RankingOfSeenPairsAgreesWithMleAboveCutoff) {
  // Every count in row a exceeds the cutoff.
  const auto c = ptr(corpus_from(
      "a\tx\t9\na\ty\t7\na\tz\t12\nb\tx\t1\nb\tw\t1\nb\ty\t2\nc\tz\t1\nc\tw\t3\nd\tw\t1\nd\tv\t4\ne\tv\t2\ne\tx\t5\n"));
  const auto k = KatzModel::build(c);
  MleModel mle(c);
  const auto a = c->nouns().at("a");
  const auto row = c->row(a);
  for (const auto& e1 : row) {
    for (const auto& e2 : row) {
      EXPECT_EQ(k.prob(a, e1.id) < k.prob(a, e2.id), mle.prob(a, e1.id) < mle.prob(a, e2.id));
    }
  }
}

TEST(Katz, CutoffIsLoweredWhenCountOfCountsHasGaps) {
  // n_1 = 2, n_2 = 0: no usable cutoff above zero.
  const auto c = ptr(corpus_from("a\tx\t1\nb\ty\t1\nb\tz\t3\n"));
  const auto k = KatzModel::build(c);
  EXPECT_LT(k.cutoff(), k.requested_cutoff());
  EXPECT_FALSE(k.warnings().empty());
  expect_katz_contract(c, k);
}

TEST(Katz, FullRowStillLeavesMassForUnseenVerbs) {
  // Row a holds only counts above the cutoff.
  const auto c = ptr(corpus_from("a\tx\t20\nb\tx\t1\nb\ty\t1\nc\ty\t2\nc\tz\t1\nd\tz\t3\n"));
  const auto k = KatzModel::build(c, {1, std::nullopt});
  const auto a = c->nouns().at("a");
  EXPECT_TRUE(k.denominator_inflated(a));
  EXPECT_GT(k.prob(a, c->verbs().at("y")), 0.0);
  expect_katz_contract(c, k);
}

TEST(BaseModelVariant, DispatchesToTheWrappedModel) {
  auto c = ptr(random_corpus(2, 10, 10, 40));
  MleModel mle(c);
  const auto katz = KatzModel::build(c);
  BaseModel a(mle), b(katz);
  EXPECT_EQ(a.kind(), BaseKind::MLE);
  EXPECT_EQ(b.kind(), BaseKind::KATZ);
  EXPECT_EQ(a.prob(0, 1), mle.prob(0, 1));
  EXPECT_EQ(b.prob(0, 1), katz.prob(0, 1));
}

}  // namespace
}  // namespace simlm
