// basemodel.hpp
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
//
// \file
// Base bigram models over a PairCorpus: maximum likelihood and Katz back-off
// with Good-Turing discounting and unigram redistribution.

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "simlm/corpus.hpp"
#include "simlm/distribution.hpp"
#include "simlm/errors.hpp"

namespace simlm {

using CorpusPtr = std::shared_ptr<const PairCorpus>;

enum class Direction { Forward, Reverse };

// P_ML(outcome | given) = c(given, outcome) / c(given).
// Forward conditions verbs on nouns; Reverse conditions nouns on verbs.
class MleModel {
 public:
  explicit MleModel(CorpusPtr corpus, Direction direction = Direction::Forward)
      : corpus_(std::move(corpus)), direction_(direction) {
    if (!corpus_) throw ConfigError("null corpus");
  }

  const PairCorpus& corpus() const noexcept { return *corpus_; }
  const CorpusPtr& corpus_ptr() const noexcept { return corpus_; }
  Direction direction() const noexcept { return direction_; }

  bool defined(WordId given) const { return given_total(given) > 0; }

  double prob(WordId given, WordId outcome) const {
    const Count total = checked_total(given);
    const Count c = forward() ? corpus_->count(given, outcome) : corpus_->count(outcome, given);
    return static_cast<double>(c) / static_cast<double>(total);
  }

  SparseDistribution row(WordId given) const {
    const double total = static_cast<double>(checked_total(given));
    auto entries = forward() ? corpus_->row(given) : corpus_->column(given);
    SparseDistribution d;
    d.entries.reserve(entries.size());
    for (const auto& e : entries) d.entries.push_back({e.id, static_cast<double>(e.count) / total});
    return d;
  }

  // P(outcome) = c(outcome) / N.
  double unigram(WordId outcome) const {
    const Count c = forward() ? corpus_->col_total(outcome) : corpus_->row_total(outcome);
    return ratio(c);
  }

  // P(given) = c(given) / N.
  double context_unigram(WordId given) const { return ratio(given_total(given)); }

 private:
  bool forward() const noexcept { return direction_ == Direction::Forward; }

  Count given_total(WordId given) const {
    return forward() ? corpus_->row_total(given) : corpus_->col_total(given);
  }

  Count checked_total(WordId given) const {
    const Count total = given_total(given);
    if (total == 0) {
      throw UndefinedConditionalError("conditional undefined for word id " +
                                      std::to_string(given) + " (zero count)");
    }
    return total;
  }

  double ratio(Count c) const {
    if (corpus_->total() == 0) throw UndefinedConditionalError("unigram of an empty corpus");
    return static_cast<double>(c) / static_cast<double>(corpus_->total());
  }

  CorpusPtr corpus_;
  Direction direction_;
};

struct KatzOptions {
  // Pair counts r <= gt_cutoff are discounted; larger counts are untouched.
  unsigned gt_cutoff = 5;
  // Count-of-counts n_r (index r) to estimate discounts from instead of the
  // corpus's own. Used when a model is built on a reduced corpus (singletons
  // removed) but the discount statistics should come from the full one.
  std::optional<std::vector<Count>> count_of_counts;
};

namespace detail {

// alpha = leftover / (1 - seen_mass); zero when nothing is left to back off to.
inline double backoff_weight(double leftover, double seen_mass) {
  const double unseen = 1.0 - seen_mass;
  if (!(unseen > 0.0) || !(leftover > 0.0)) return 0.0;
  return leftover / unseen;
}

}  // namespace detail

// Katz back-off:
//   P(w2|w1) = d_r r / c(w1)          if r = c(w1,w2) > 0
//            = alpha(w1) P(w2)         otherwise
// with d_r = (r*/r - mu) / (1 - mu), r* = (r+1) n_{r+1} / n_r and
// mu = (k+1) n_{k+1} / n_1 for r <= k, and d_r = 1 above the cutoff k.
class KatzModel {
 public:
  static KatzModel build(CorpusPtr corpus, KatzOptions options = {}) {
    if (!corpus) throw ConfigError("null corpus");
    KatzModel m;
    m.corpus_ = std::move(corpus);
    m.requested_cutoff_ = options.gt_cutoff;
    m.count_of_counts_ = options.count_of_counts ? *options.count_of_counts
                                                 : count_of_counts(*m.corpus_);
    m.fit_discounts();
    m.fit_rows();
    return m;
  }

  // n_r for r = 0..max count (n_0 unused, left zero).
  static std::vector<Count> count_of_counts(const PairCorpus& corpus) {
    std::vector<Count> n(2, 0);
    for (WordId w = 0; w < corpus.nouns().size(); ++w) {
      for (const auto& e : corpus.row(w)) {
        if (e.count >= n.size()) n.resize(e.count + 1, 0);
        ++n[e.count];
      }
    }
    return n;
  }

  const PairCorpus& corpus() const noexcept { return *corpus_; }
  const CorpusPtr& corpus_ptr() const noexcept { return corpus_; }

  unsigned cutoff() const noexcept { return cutoff_; }
  unsigned requested_cutoff() const noexcept { return requested_cutoff_; }
  const std::vector<Count>& count_of_counts() const noexcept { return count_of_counts_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  // Discount ratio d_r.
  double discount(Count r) const {
    if (r == 0) throw DomainError("discount undefined for r = 0");
    return r <= cutoff_ ? discounts_[r] : 1.0;
  }

  // Raw Good-Turing count r* = (r+1) n_{r+1} / n_r, or nullopt if n_r = 0.
  std::optional<double> good_turing_count(Count r) const { return raw_good_turing(count_of_counts_, r); }

  bool defined(WordId w1) const { return corpus_->row_total(w1) > 0; }
  bool seen(WordId w1, WordId w2) const { return corpus_->count(w1, w2) > 0; }

  double unigram(WordId w2) const {
    return static_cast<double>(corpus_->col_total(w2)) / static_cast<double>(corpus_->total());
  }

  // P_d(w2|w1) for a seen pair, 0 for an unseen one.
  double discounted(WordId w1, WordId w2) const {
    const Count r = corpus_->count(w1, w2);
    if (r == 0) {
      checked_row(w1);
      return 0.0;
    }
    return discount(r) * static_cast<double>(r) / checked_row(w1).denominator;
  }

  // 1 - sum of discounted seen-pair probabilities in the row.
  double leftover(WordId w1) const { return checked_row(w1).leftover; }
  // Unigram mass of the verbs seen with w1.
  double seen_unigram_mass(WordId w1) const { return checked_row(w1).seen_unigram_mass; }
  double alpha(WordId w1) const { return checked_row(w1).alpha; }
  // Some verb with c(w2) > 0 was never seen with w1.
  bool has_unseen_verbs(WordId w1) const { return checked_row(w1).unseen_verbs; }
  // True when the row's denominator was raised to c(w1)+1 because every seen
  // count was above the cutoff.
  bool denominator_inflated(WordId w1) const {
    const auto& r = checked_row(w1);
    return r.denominator != static_cast<double>(corpus_->row_total(w1));
  }

  double prob(WordId w1, WordId w2) const {
    const auto& row = checked_row(w1);
    const Count r = corpus_->count(w1, w2);
    if (r > 0) return discount(r) * static_cast<double>(r) / row.denominator;
    return row.alpha * unigram(w2);
  }

  SparseDistribution row(WordId w1) const {
    const auto& rs = checked_row(w1);
    auto seen_entries = corpus_->row(w1);
    SparseDistribution d;
    std::size_t s = 0;
    for (WordId v = 0; v < corpus_->verbs().size(); ++v) {
      double p;
      if (s < seen_entries.size() && seen_entries[s].id == v) {
        p = discount(seen_entries[s].count) * static_cast<double>(seen_entries[s].count) / rs.denominator;
        ++s;
      } else {
        p = rs.alpha * unigram(v);
      }
      if (p > 0.0) d.entries.push_back({v, p});
    }
    return d;
  }

 private:
  struct RowState {
    double denominator = 0.0;
    double leftover = 0.0;
    double seen_unigram_mass = 0.0;
    double alpha = 0.0;
    bool unseen_verbs = false;
  };

  static std::optional<double> raw_good_turing(const std::vector<Count>& n, Count r) {
    auto nr = [&](Count i) -> Count { return i < n.size() ? n[i] : 0; };
    if (r == 0 || nr(r) == 0) return std::nullopt;
    return static_cast<double>(r + 1) * static_cast<double>(nr(r + 1)) / static_cast<double>(nr(r));
  }

  // Lowers the cutoff until every discount in range is a proper ratio in (0, 1].
  void fit_discounts() {
    const auto& n = count_of_counts_;
    auto nr = [&](Count i) -> Count { return i < n.size() ? n[i] : 0; };
    for (unsigned k = requested_cutoff_; k > 0; --k) {
      std::string problem;
      std::vector<double> d(k + 1, 1.0);
      for (Count r = 1; r <= k + 1 && problem.empty(); ++r) {
        if (nr(r) == 0) problem = "n_" + std::to_string(r) + " = 0";
      }
      if (problem.empty()) {
        const double mu = static_cast<double>(k + 1) * static_cast<double>(nr(k + 1)) /
                          static_cast<double>(nr(1));
        if (!(mu < 1.0)) problem = "(k+1) n_{k+1} / n_1 >= 1";
        for (Count r = 1; r <= k && problem.empty(); ++r) {
          const double ratio = *raw_good_turing(n, r) / static_cast<double>(r);
          d[r] = (ratio - mu) / (1.0 - mu);
          if (!(d[r] > 0.0 && d[r] <= 1.0)) {
            problem = "discount d_" + std::to_string(r) + " = " + std::to_string(d[r]) + " outside (0, 1]";
          }
        }
      }
      if (problem.empty()) {
        cutoff_ = k;
        discounts_ = std::move(d);
        return;
      }
      warnings_.push_back("Good-Turing cutoff " + std::to_string(k) + " unusable (" + problem +
                          "); lowering to " + std::to_string(k - 1));
    }
    cutoff_ = 0;
    discounts_.assign(1, 1.0);
  }

  void fit_rows() {
    const auto& c = *corpus_;
    const double n_total = static_cast<double>(c.total());
    rows_.assign(c.nouns().size(), RowState{});
    std::size_t inflated = 0;
    for (WordId w1 = 0; w1 < c.nouns().size(); ++w1) {
      const Count total = c.row_total(w1);
      if (total == 0) continue;
      RowState rs;
      double kept = 0.0;  // sum of d_r r in count space
      Count seen_verb_mass = 0;
      for (const auto& e : c.row(w1)) {
        kept += discount(e.count) * static_cast<double>(e.count);
        seen_verb_mass += c.col_total(e.id);
        rs.seen_unigram_mass += static_cast<double>(c.col_total(e.id)) / n_total;
      }
      rs.denominator = static_cast<double>(total);
      const bool unseen_exist = seen_verb_mass < c.total();
      // No mass left although some verbs were never seen with w1: raise the
      // denominator by one so they still get a share.
      if (unseen_exist && rs.denominator - kept <= 1e-9 * rs.denominator) {
        rs.denominator += 1.0;
        ++inflated;
      }
      rs.leftover = (rs.denominator - kept) / rs.denominator;
      if (rs.leftover < 0.0) rs.leftover = 0.0;
      rs.unseen_verbs = unseen_exist;
      rs.alpha = unseen_exist ? detail::backoff_weight(rs.leftover, rs.seen_unigram_mass) : 0.0;
      rows_[w1] = rs;
    }
    if (inflated > 0) {
      warnings_.push_back(std::to_string(inflated) +
                          " rows had no back-off mass; denominator incremented by one");
    }
  }

  const RowState& checked_row(WordId w1) const {
    if (corpus_->row_total(w1) == 0) {
      throw UndefinedConditionalError("conditional undefined for noun id " + std::to_string(w1) +
                                      " (zero count)");
    }
    return rows_[w1];
  }

  CorpusPtr corpus_;
  unsigned requested_cutoff_ = 0;
  unsigned cutoff_ = 0;
  std::vector<Count> count_of_counts_;
  std::vector<double> discounts_;
  std::vector<RowState> rows_;
  std::vector<std::string> warnings_;
};

enum class BaseKind { MLE, KATZ };

// Either base model behind one query surface (forward direction).
class BaseModel {
 public:
  BaseModel(MleModel m) : model_(std::move(m)) {
    if (std::get<MleModel>(model_).direction() != Direction::Forward) {
      throw ConfigError("base model must condition verbs on nouns");
    }
  }
  BaseModel(KatzModel m) : model_(std::move(m)) {}

  BaseKind kind() const noexcept {
    return std::holds_alternative<MleModel>(model_) ? BaseKind::MLE : BaseKind::KATZ;
  }

  const PairCorpus& corpus() const {
    return std::visit([](const auto& m) -> const PairCorpus& { return m.corpus(); }, model_);
  }
  bool defined(WordId w1) const {
    return std::visit([&](const auto& m) { return m.defined(w1); }, model_);
  }
  double prob(WordId w1, WordId w2) const {
    return std::visit([&](const auto& m) { return m.prob(w1, w2); }, model_);
  }
  SparseDistribution row(WordId w1) const {
    return std::visit([&](const auto& m) { return m.row(w1); }, model_);
  }
  double unigram(WordId w2) const {
    return std::visit([&](const auto& m) { return m.unigram(w2); }, model_);
  }

  const MleModel* mle() const noexcept { return std::get_if<MleModel>(&model_); }
  const KatzModel* katz() const noexcept { return std::get_if<KatzModel>(&model_); }

 private:
  std::variant<MleModel, KatzModel> model_;
};

}  // namespace simlm
