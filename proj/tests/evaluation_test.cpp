// evaluation_test.cpp
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

#include <gtest/gtest.h>

#include "test_util.hpp"

namespace simlm {
namespace {

using testing::ptr;

TEST(PseudoWords, AdjacentFrequencyPairs) {
  // va..vd = ids 0..3, listed out of frequency order.
  const std::vector<Count> freq{49, 100, 50, 98};
  const auto m = build_pseudowords(freq);
  ASSERT_EQ(m.pairs.size(), 2u);
  EXPECT_EQ(m.pairs[0], (std::pair<WordId, WordId>{1, 3}));
  EXPECT_EQ(m.pairs[1], (std::pair<WordId, WordId>{2, 0}));
  EXPECT_FALSE(m.dropped.has_value());
}

TEST(PseudoWords, OddVerbIsDropped) {
  const std::vector<Count> freq{5, 4, 3, 2, 1};
  const auto m = build_pseudowords(freq);
  EXPECT_EQ(m.pairs.size(), 2u);
  ASSERT_TRUE(m.dropped.has_value());
  EXPECT_EQ(*m.dropped, 4u);
  EXPECT_FALSE(m.covers(4));
  EXPECT_THROW(m.lookup(4), LookupError);
}

TEST(PseudoWords, InvolutionWithoutFixedPoints) {
  std::vector<Count> freq;
  for (int i = 0; i < 41; ++i) freq.push_back(static_cast<Count>((i * 37) % 13));
  const auto m = build_pseudowords(freq);
  for (WordId v = 0; v < freq.size(); ++v) {
    if (!m.covers(v)) continue;
    EXPECT_NE(m.lookup(v), v);
    EXPECT_EQ(m.lookup(m.lookup(v)), v);
  }
  for (WordId v = 0; v < freq.size(); ++v) {
    if (freq[v] == 0) EXPECT_FALSE(m.covers(v));
  }
}

TEST(PseudoWords, TooFewVerbsIsAConfigError) {
  const std::vector<Count> one{3, 0};
  EXPECT_THROW(build_pseudowords(one), ConfigError);
}

TEST(Trials, DecisionsAndContext) {
  const std::vector<Count> freq{10, 9};
  const auto m = build_pseudowords(freq);
  auto scores = [](WordId, WordId v) { return v == 0 ? 0.3 : 0.1; };
  EXPECT_EQ(run_trial(0, 0, m, scores).decision, Decision::Correct);
  EXPECT_EQ(run_trial(0, 1, m, scores).decision, Decision::Incorrect);
  EXPECT_EQ(run_trial(0, 1, m, [](WordId, WordId) { return 0.0; }).decision, Decision::Tie);
  EXPECT_THROW(run_trial(0, 0, m, [](WordId, WordId) -> double { throw DomainError("boom"); }), TrialError);
}

TEST(ErrorRate, Formula) {
  ErrorCounts c;
  for (int i = 0; i < 5; ++i) c.add(Decision::Correct);
  for (int i = 0; i < 3; ++i) c.add(Decision::Incorrect);
  for (int i = 0; i < 2; ++i) c.add(Decision::Tie);
  EXPECT_DOUBLE_EQ(c.rate(), 0.4);

  std::vector<TrialOutcome> ties(7, TrialOutcome{{0, 0, 1}, Decision::Tie, 0, 0});
  EXPECT_EQ(error_rate(ties), 0.5);
  std::vector<TrialOutcome> right(4, TrialOutcome{{0, 0, 1}, Decision::Correct, 1, 0});
  EXPECT_EQ(error_rate(right), 0.0);
  EXPECT_THROW(error_rate(std::span<const TrialOutcome>{}), ConfigError);
}

TEST(ErrorRate, PermutationInvariant) {
  std::vector<TrialOutcome> o;
  for (int i = 0; i < 9; ++i) o.push_back({{0, 0, 1}, static_cast<Decision>(i % 3), 0, 0});
  const double r = error_rate(o);
  std::reverse(o.begin(), o.end());
  EXPECT_EQ(error_rate(o), r);
}

// Small synthetic experiment shared by the cross-validation tests.
class CrossValidation : public ::testing::Test {
 protected:
  void SetUp() override {
    BlockCorpusSpec spec;
    spec.seed = 5;
    spec.train_pairs = 6000;
    spec.test_pairs = 600;
    syn_ = generate_block_corpus(spec);
    config_.seed = 5;
    config_.beta_grid = {0.5, 1, 2, 4, 8, 16};
    data_ = prepare_experiment(syn_.train, syn_.test, config_);
    suite_ = make_suite(BaseModelId::MLE_1, data_, 5);
    options_.beta_grid = config_.beta_grid;
    options_.rand_seed = 11;
  }

  SyntheticCorpus syn_;
  RunConfig config_;
  ExperimentData data_;
  std::unique_ptr<ModelSuite> suite_;
  CrossValidationOptions options_;
};

TEST_F(CrossValidation, MleIsExactlyOneHalfOnEveryFold) {
  for (const auto& r : cross_validate_method(*suite_, Method::MLE, data_.folds, options_)) {
    EXPECT_EQ(r.error_rate, 0.5);
    EXPECT_EQ(r.counts.ties, r.counts.n);
    EXPECT_FALSE(r.beta.has_value());
  }
}

TEST_F(CrossValidation, KatzDecidesByUnigramFrequency) {
  const auto& katz = suite_->katz();
  std::size_t checked = 0;
  for (const auto& fold : data_.folds) {
    for (const auto& t : fold) {
      const auto o = run_trial(t.noun, t.correct, data_.pseudowords,
                               [&](WordId n, WordId v) { return katz.prob(n, v); });
      const double uc = katz.unigram(t.correct), ud = katz.unigram(t.decoy);
      EXPECT_EQ(o.decision, decide(uc, ud));
      if (data_.train->col_total(t.correct) == data_.train->col_total(t.decoy)) {
        EXPECT_EQ(o.decision, Decision::Tie);
      }
      ++checked;
    }
  }
  EXPECT_GT(checked, 0u);
}

TEST_F(CrossValidation, ConfusionIgnoresTheGrid) {
  const auto a = cross_validate_method(*suite_, Method::CONFUSION, data_.folds, options_);
  auto other = options_;
  other.beta_grid = {3.0};
  const auto b = cross_validate_method(*suite_, Method::CONFUSION, data_.folds, other);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].counts, b[i].counts);
    EXPECT_FALSE(a[i].beta.has_value());
  }
}

TEST_F(CrossValidation, TunedBetaNeverSeesItsTestFold) {
  for (Method m : {Method::AVG, Method::L1, Method::KL}) {
    const auto rows = cross_validate_method(*suite_, m, data_.folds, options_);
    for (const auto& r : rows) {
      ASSERT_TRUE(r.beta.has_value());
      EXPECT_EQ(std::count(r.tuning_folds.begin(), r.tuning_folds.end(), r.fold), 0);
      EXPECT_EQ(r.tuning_folds.size(), data_.folds.size() - 1);
    }
  }
}

TEST_F(CrossValidation, TunedBetaMinimisesTuningError) {
  // Oracle: evaluate each beta alone and pick the smallest minimiser on the
  // tuning folds.
  const auto rows = cross_validate_method(*suite_, Method::L1, data_.folds, options_);
  std::vector<std::vector<FoldReport>> single;
  for (double b : options_.beta_grid) {
    auto o = options_;
    o.beta_grid = {b};
    single.push_back(cross_validate_method(*suite_, Method::L1, data_.folds, o));
  }
  for (const auto& r : rows) {
    double best = 2.0, best_beta = 0.0;
    for (std::size_t g = 0; g < single.size(); ++g) {
      ErrorCounts c;
      for (auto f : r.tuning_folds) c += single[g][f].counts;
      if (c.rate() < best) {
        best = c.rate();
        best_beta = options_.beta_grid[g];
      }
    }
    EXPECT_EQ(*r.beta, best_beta);
    const auto g = static_cast<std::size_t>(
        std::find(options_.beta_grid.begin(), options_.beta_grid.end(), best_beta) - options_.beta_grid.begin());
    EXPECT_EQ(r.counts, single[g][r.fold].counts);
  }
}

TEST(TuneBeta, TiesGoToTheSmallestBeta) {
  ErrorCounts same{10, 3, 0};
  const std::vector<detail::FoldCounts> per_beta{{same, same}, {same, same}, {{10, 2, 0}, same}};
  const std::vector<std::size_t> both{0, 1}, second{1};
  EXPECT_EQ(detail::tune_beta(per_beta, both), 2u);
  EXPECT_EQ(detail::tune_beta(per_beta, second), 0u);
}

TEST_F(CrossValidation, EmptyGridIsRejectedForTunableMethods) {
  auto o = options_;
  o.beta_grid.clear();
  EXPECT_THROW(cross_validate_method(*suite_, Method::AVG, data_.folds, o), ConfigError);
  EXPECT_NO_THROW(cross_validate_method(*suite_, Method::CONFUSION, data_.folds, o));
}

TEST_F(CrossValidation, ParallelGridMatchesSerial) {
  auto katz_suite = make_suite(BaseModelId::BO_O1, data_, 5);
  const std::vector<const ModelSuite*> suites{suite_.get(), katz_suite.get()};
  const std::vector<Method> methods(std::begin(kAllMethods), std::end(kAllMethods));
  const auto serial = cross_validate(data_.folds, methods, suites, options_, 1);
  const auto parallel = cross_validate(data_.folds, methods, suites, options_, 6);
  ASSERT_EQ(serial.size(), parallel.size());
  ASSERT_EQ(serial.size(), 2 * methods.size() * data_.folds.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    EXPECT_EQ(serial[i].base, parallel[i].base);
    EXPECT_EQ(serial[i].method, parallel[i].method);
    EXPECT_EQ(serial[i].fold, parallel[i].fold);
    EXPECT_EQ(serial[i].counts, parallel[i].counts);
    EXPECT_EQ(serial[i].beta, parallel[i].beta);
  }
}

TEST_F(CrossValidation, SimilarityBeatsRandom) {
  auto err = [&](Method m) {
    double s = 0;
    for (const auto& r : cross_validate_method(*suite_, m, data_.folds, options_)) s += r.error_rate;
    return s / static_cast<double>(data_.folds.size());
  };
  const double rand = err(Method::RAND);
  for (Method m : {Method::AVG, Method::L1, Method::CONFUSION}) EXPECT_LT(err(m), rand);
}

FoldReport report(std::size_t fold, double rate) {
  FoldReport r;
  r.fold = fold;
  r.counts = {100, 0, 0};
  r.error_rate = rate;
  return r;
}

TEST(PairedDifference, IdenticalReportsHaveNoStatistic) {
  const std::vector<FoldReport> a{report(0, 0.2), report(1, 0.3), report(2, 0.25)};
  const auto d = paired_difference(a, a);
  EXPECT_EQ(d.mean, 0.0);
  EXPECT_TRUE(d.zero_variance);
  EXPECT_FALSE(d.t_statistic.has_value());
}

TEST(PairedDifference, ConstantShift) {
  const std::vector<FoldReport> a{report(0, 0.25), report(1, 0.375), report(2, 0.5)};
  const std::vector<FoldReport> b{report(0, 0.125), report(1, 0.25), report(2, 0.375)};
  const auto d = paired_difference(a, b);
  EXPECT_EQ(d.mean, 0.125);
  EXPECT_TRUE(d.zero_variance);
  EXPECT_FALSE(d.t_statistic.has_value());
}

TEST(PairedDifference, TStatistic) {
  const std::vector<FoldReport> a{report(0, 0.3), report(1, 0.4), report(2, 0.2)};
  const std::vector<FoldReport> b{report(0, 0.2), report(1, 0.2), report(2, 0.2)};
  const auto d = paired_difference(a, b);
  // Differences 0.1, 0.2, 0.0: mean 0.1, sd 0.1, t = 0.1 / (0.1 / sqrt 3).
  EXPECT_NEAR(d.mean, 0.1, 1e-15);
  ASSERT_TRUE(d.t_statistic.has_value());
  EXPECT_NEAR(*d.t_statistic, std::sqrt(3.0), 1e-12);
}

TEST(PairedDifference, MismatchedFoldsAreRejected) {
  const std::vector<FoldReport> a{report(0, 0.3), report(1, 0.4)};
  const std::vector<FoldReport> b{report(0, 0.3)};
  EXPECT_THROW(paired_difference(a, b), ConfigError);
  std::vector<FoldReport> c{report(0, 0.3), report(2, 0.4)};
  EXPECT_THROW(paired_difference(a, c), ConfigError);
}

}  // namespace
}  // namespace simlm
