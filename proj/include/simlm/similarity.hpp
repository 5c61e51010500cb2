// similarity.hpp
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
// Distributional (dis)similarity between nouns and the combination weights
// derived from it:
//
//   KL         D(p || q)        dissimilarity, q smoothed     W = 10^(-beta D)
//   AVG        D(p||m)+D(q||m)  dissimilarity in [0, 2 ln 2]  W = 10^(-beta A)
//   L1         sum |p - q|      dissimilarity in [0, 2]       W = (2 - L)^beta
//   CONFUSION  P_C(w1'|w1)      affinity                      W = P_C
//   RAND       -                control                       W ~ U(0, 1]
//
// All logarithms are natural.

#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "simlm/basemodel.hpp"
#include "simlm/distribution.hpp"
#include "simlm/errors.hpp"
#include "simlm/rng.hpp"

namespace simlm {

inline constexpr double kLn2 = std::numbers::ln2;
inline constexpr double kMaxAvgDivergence = 2.0 * std::numbers::ln2;
inline constexpr double kNegativeSlack = 1e-12;

enum class Measure { KL, AVG, L1, CONFUSION, RAND };

inline std::string_view to_string(Measure m) {
  switch (m) {
    case Measure::KL: return "KL";
    case Measure::AVG: return "AVG";
    case Measure::L1: return "L1";
    case Measure::CONFUSION: return "CONFUSION";
    case Measure::RAND: return "RAND";
  }
  return "?";
}

inline std::optional<Measure> parse_measure(std::string_view s) {
  for (Measure m : {Measure::KL, Measure::AVG, Measure::L1, Measure::CONFUSION, Measure::RAND}) {
    if (s == to_string(m)) return m;
  }
  return std::nullopt;
}

// Larger raw value means less similar.
constexpr bool is_dissimilarity(Measure m) {
  return m == Measure::KL || m == Measure::AVG || m == Measure::L1;
}

// Weight depends on a free beta that is tuned by grid search.
constexpr bool is_tunable(Measure m) { return is_dissimilarity(m); }

// Merge-walk step counter used to check sparse kernels stay linear in the
// supports they touch.
struct OpCounter {
  std::size_t steps = 0;
};

// D(p || q) = sum_{w in supp p} p(w) ln(p(w) / q(w)). q must be positive on
// supp p.
template <typename Q>
  requires std::invocable<const Q&, WordId>
double kl_divergence(const SparseDistribution& p, const Q& q) {
  double d = 0.0;
  for (const auto& e : p.entries) {
    const double qv = static_cast<double>(q(e.id));
    if (!(qv > 0.0)) {
      throw DomainError("KL divergence undefined: q(" + std::to_string(e.id) + ") = 0");
    }
    d += e.p * std::log(e.p / qv);
  }
  return d;
}

inline double kl_divergence(const SparseDistribution& p, const SparseDistribution& q) {
  return kl_divergence(p, [&q](WordId w) { return q.at(w); });
}

// Total divergence to the average, A(p, q) = D(p || m) + D(q || m) with
// m = (p + q) / 2. Grouping over the common support C gives
//   A = sum_C { H(p + q) - H(p) - H(q) } + 2 ln 2,     H(x) = -x ln x.
// Folding (p + q) ln 2 into each common term and the remaining constant
// into the mass outside C yields
//   A = sum_C { p ln(2p / (p+q)) + q ln(2q / (p+q)) } + ln 2 * (mass off C),
// which is exactly zero for p == q and exactly symmetric.
inline double total_divergence_to_average(const SparseDistribution& p, const SparseDistribution& q,
                                          OpCounter* ops = nullptr) {
  const auto& a = p.entries;
  const auto& b = q.entries;
  std::size_t i = 0, j = 0, steps = 0;
  double common = 0.0;
  double exclusive = 0.0;
  while (i < a.size() || j < b.size()) {
    ++steps;
    if (j == b.size() || (i < a.size() && a[i].id < b[j].id)) {
      exclusive += a[i++].p;
    } else if (i == a.size() || b[j].id < a[i].id) {
      exclusive += b[j++].p;
    } else {
      const double x = a[i++].p;
      const double y = b[j++].p;
      const double s = x + y;
      common += x * std::log(2.0 * x / s) + y * std::log(2.0 * y / s);
    }
  }
  if (ops) ops->steps += steps;
  return std::clamp(common + kLn2 * exclusive, 0.0, kMaxAvgDivergence);
}

// L1(p, q) = sum |p - q| = 2 - sum_C p - sum_C q + sum_C |p - q|, computed as
// sum_C |p - q| + (mass off C).
inline double l1_distance(const SparseDistribution& p, const SparseDistribution& q,
                          OpCounter* ops = nullptr) {
  const auto& a = p.entries;
  const auto& b = q.entries;
  std::size_t i = 0, j = 0, steps = 0;
  double common = 0.0;
  double exclusive = 0.0;
  while (i < a.size() || j < b.size()) {
    ++steps;
    if (j == b.size() || (i < a.size() && a[i].id < b[j].id)) {
      exclusive += a[i++].p;
    } else if (i == a.size() || b[j].id < a[i].id) {
      exclusive += b[j++].p;
    } else {
      common += std::abs(a[i++].p - b[j++].p);
    }
  }
  if (ops) ops->steps += steps;
  return std::clamp(common + exclusive, 0.0, 2.0);
}

// P_C(w1'|w1) = sum_{w2} P(w2|w1) / P(w2) * P(w2|w1') * P(w1'), which equals
// sum_{w2} P(w1|w2) P(w1'|w2) P(w2) / P(w1) for Bayes-consistent estimates.
// Only verbs seen with both nouns contribute.
inline double confusion_probability(const MleModel& forward, WordId w1, WordId w1p) {
  if (forward.direction() != Direction::Forward) {
    throw ConfigError("confusion probability needs the forward MLE model");
  }
  const auto& c = forward.corpus();
  const auto a = c.row(w1);
  const auto b = c.row(w1p);
  const double n1 = static_cast<double>(c.row_total(w1));
  const double n1p = static_cast<double>(c.row_total(w1p));
  if (n1 == 0.0 || n1p == 0.0) {
    throw UndefinedConditionalError("confusion probability needs nouns with non-zero counts");
  }
  const double total = static_cast<double>(c.total());
  const double prior = n1p / total;
  double sum = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].id < b[j].id) {
      ++i;
    } else if (b[j].id < a[i].id) {
      ++j;
    } else {
      const Count cv = c.col_total(a[i].id);
      if (cv == 0) throw DomainError("zero unigram for verb id " + std::to_string(a[i].id));
      const double p_w2_given_w1 = static_cast<double>(a[i].count) / n1;
      const double p_w2 = static_cast<double>(cv) / total;
      const double p_w2_given_w1p = static_cast<double>(b[j].count) / n1p;
      sum += p_w2_given_w1 / p_w2 * p_w2_given_w1p * prior;
      ++i;
      ++j;
    }
  }
  return sum;
}

struct Neighborhood {
  enum class Kind { All, TopK, Threshold, TopKAndThreshold };
  Kind kind = Kind::All;
  std::size_t k = 0;
  double threshold = 0.0;

  static Neighborhood all() { return {}; }
  static Neighborhood top_k(std::size_t k) { return {Kind::TopK, k, 0.0}; }
  static Neighborhood below(double t) { return {Kind::Threshold, 0, t}; }
  static Neighborhood top_k_below(std::size_t k, double t) { return {Kind::TopKAndThreshold, k, t}; }

  bool limits_count() const { return kind == Kind::TopK || kind == Kind::TopKAndThreshold; }
  bool limits_value() const { return kind == Kind::Threshold || kind == Kind::TopKAndThreshold; }

  // "all", "top:K", "threshold:T" or "top:K,threshold:T".
  static Neighborhood parse(std::string_view s) {
    auto number = [&](std::string_view v) {
      try {
        std::size_t used = 0;
        const std::string str(v);
        const double x = std::stod(str, &used);
        if (used != str.size()) throw ConfigError("");
        return x;
      } catch (...) {
        throw ConfigError("bad number '" + std::string(v) + "' in neighborhood '" + std::string(s) + "'");
      }
    };
    if (s == "all") return all();
    Neighborhood n;
    bool has_k = false, has_t = false;
    std::size_t start = 0;
    while (start <= s.size()) {
      auto comma = s.find(',', start);
      auto part = s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
      if (part.rfind("top:", 0) == 0 && !has_k) {
        const double k = number(part.substr(4));
        if (k < 1 || k != std::floor(k)) throw ConfigError("neighborhood k must be a positive integer");
        n.k = static_cast<std::size_t>(k);
        has_k = true;
      } else if (part.rfind("threshold:", 0) == 0 && !has_t) {
        n.threshold = number(part.substr(10));
        has_t = true;
      } else {
        throw ConfigError("unrecognised neighborhood '" + std::string(s) + "'");
      }
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    n.kind = has_k && has_t ? Kind::TopKAndThreshold : has_k ? Kind::TopK : Kind::Threshold;
    return n;
  }

  std::string to_string() const {
    auto num = [](double x) {
      std::string s = std::to_string(x);
      s.erase(s.find_last_not_of('0') + 1);
      if (s.back() == '.') s.pop_back();
      return s;
    };
    switch (kind) {
      case Kind::All: return "all";
      case Kind::TopK: return "top:" + std::to_string(k);
      case Kind::Threshold: return "threshold:" + num(threshold);
      case Kind::TopKAndThreshold: return "top:" + std::to_string(k) + ",threshold:" + num(threshold);
    }
    return "all";
  }

  friend bool operator==(const Neighborhood&, const Neighborhood&) = default;
};

struct WeightConfig {
  Measure measure = Measure::AVG;
  double beta = 1.0;
  Neighborhood neighborhood;
  std::uint64_t seed = 0;  // RAND only

  void validate() const {
    if (is_tunable(measure) && !(beta > 0.0)) throw ConfigError("beta must be positive");
    if (neighborhood.limits_count() && neighborhood.k < 1) throw ConfigError("neighborhood k must be >= 1");
    if (neighborhood.limits_value()) {
      const double t = neighborhood.threshold;
      const double hi = measure == Measure::AVG   ? kMaxAvgDivergence
                        : measure == Measure::L1  ? 2.0
                        : measure == Measure::KL  ? std::numeric_limits<double>::infinity()
                                                  : 1.0;
      if (!(t >= 0.0 && t <= hi)) throw ConfigError("neighborhood threshold outside the measure's range");
    }
  }
};

// Weight for a raw measure value. RAND ignores raw and draws a value in
// (0, 1] keyed by (seed, w1, w1').
inline double weight(const WeightConfig& config, double raw, WordId w1 = 0, WordId w1p = 0) {
  if (config.measure == Measure::RAND) return keyed_unit(config.seed, w1, w1p);
  if (raw < -kNegativeSlack || std::isnan(raw)) {
    throw DomainError("raw " + std::string(to_string(config.measure)) + " value " + std::to_string(raw) +
                      " is negative");
  }
  raw = std::max(raw, 0.0);
  switch (config.measure) {
    case Measure::KL:
    case Measure::AVG:
      return std::pow(10.0, -config.beta * raw);
    case Measure::L1:
      if (raw > 2.0 + kNegativeSlack) throw DomainError("L1 value above 2");
      return std::pow(std::max(0.0, 2.0 - raw), config.beta);
    case Measure::CONFUSION:
      return raw;
    case Measure::RAND:
      break;
  }
  return 0.0;
}

struct Neighbor {
  WordId id;
  double raw;
  double weight;
};

struct SimilarityProfile {
  WordId target = 0;
  std::vector<Neighbor> neighbors;  // closest first

  double normalizer() const {
    double n = 0.0;
    for (const auto& x : neighbors) n += x.weight;
    return n;
  }
};

// Weights for ranking-only use: the same ratios as weight() but divided by
// the largest weight in the neighbourhood, evaluated in log space so large
// beta does not underflow every weight to zero.
inline std::vector<double> ranking_weights(const WeightConfig& config, std::span<const Neighbor> neighbors,
                                           WordId target) {
  std::vector<double> w(neighbors.size(), 0.0);
  if (neighbors.empty()) return w;
  switch (config.measure) {
    case Measure::KL:
    case Measure::AVG: {
      double lo = std::numeric_limits<double>::infinity();
      for (const auto& n : neighbors) lo = std::min(lo, n.raw);
      for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] = std::pow(10.0, -config.beta * (neighbors[i].raw - lo));
      }
      break;
    }
    case Measure::L1: {
      double lo = 2.0;
      for (const auto& n : neighbors) lo = std::min(lo, n.raw);
      const double top = 2.0 - lo;
      if (!(top > 0.0)) break;
      for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] = std::pow(std::max(0.0, 2.0 - neighbors[i].raw) / top, config.beta);
      }
      break;
    }
    case Measure::CONFUSION:
    case Measure::RAND:
      for (std::size_t i = 0; i < w.size(); ++i) w[i] = weight(config, neighbors[i].raw, target, neighbors[i].id);
      break;
  }
  return w;
}

// Computes raw (dis)similarities between nouns and turns them into profiles.
//
// AVG and L1 compare rows of the base model; KL compares the MLE row of w1
// with the smoothed (Katz) row of w1'; CONFUSION uses MLE estimates, which
// are Bayes-consistent. Only nouns with a defined base row are candidates.
// Thread-safe after construction.
class SimilarityEngine {
 public:
  SimilarityEngine(const BaseModel& base, const MleModel& mle, const KatzModel* smoothed = nullptr)
      : base_(&base), mle_(&mle), smoothed_(smoothed) {
    if (&mle.corpus() != &base.corpus() && !(mle.corpus() == base.corpus())) {
      throw ConfigError("similarity engine models must share a corpus");
    }
    const auto& c = base.corpus();
    base_rows_.resize(c.nouns().size());
    mle_rows_.resize(c.nouns().size());
    for (WordId w = 0; w < c.nouns().size(); ++w) {
      if (!base.defined(w)) continue;
      candidates_.push_back(w);
      base_rows_[w] = base.row(w);
      mle_rows_[w] = mle.row(w);
    }
  }

  const BaseModel& base() const noexcept { return *base_; }
  const std::vector<WordId>& candidates() const noexcept { return candidates_; }

  const SparseDistribution& base_row(WordId w) const {
    check_defined(w);
    return base_rows_[w];
  }

  double raw(Measure m, WordId w1, WordId w1p) const {
    check_defined(w1);
    check_defined(w1p);
    switch (m) {
      case Measure::KL: {
        if (!smoothed_) throw ConfigError("KL needs a smoothed (Katz) model");
        const KatzModel& q = *smoothed_;
        return kl_divergence(mle_rows_[w1], [&](WordId w2) { return q.prob(w1p, w2); });
      }
      case Measure::AVG:
        return total_divergence_to_average(base_rows_[w1], base_rows_[w1p]);
      case Measure::L1:
        return l1_distance(base_rows_[w1], base_rows_[w1p]);
      case Measure::CONFUSION:
        return confusion_probability(*mle_, w1, w1p);
      case Measure::RAND:
        return 0.0;
    }
    return 0.0;
  }

  // Raw values against every candidate, in candidate (id) order. Memoized.
  std::vector<Neighbor> raw_values(Measure m, WordId target) const {
    check_defined(target);
    {
      std::lock_guard lock(mu_);
      auto it = memo_.find({m, target});
      if (it != memo_.end()) return it->second;
    }
    std::vector<Neighbor> out;
    out.reserve(candidates_.size());
    for (WordId c : candidates_) out.push_back({c, raw(m, target, c), 0.0});
    std::lock_guard lock(mu_);
    return memo_.try_emplace({m, target}, std::move(out)).first->second;
  }

  // Candidates kept by the neighbourhood policy, closest first, ties by id.
  // Weights are filled in.
  std::vector<Neighbor> select(WordId target, const WeightConfig& config) const {
    config.validate();
    auto all = raw_values(config.measure, target);
    for (auto& n : all) n.weight = weight(config, n.raw, target, n.id);

    const Measure m = config.measure;
    auto closer = [m](const Neighbor& a, const Neighbor& b) {
      if (is_dissimilarity(m)) {
        if (a.raw != b.raw) return a.raw < b.raw;
      } else if (m == Measure::CONFUSION) {
        if (a.raw != b.raw) return a.raw > b.raw;
      } else if (a.weight != b.weight) {
        return a.weight > b.weight;
      }
      return a.id < b.id;
    };
    std::stable_sort(all.begin(), all.end(), closer);

    const auto& nb = config.neighborhood;
    if (nb.limits_value()) {
      std::erase_if(all, [&](const Neighbor& n) {
        if (is_dissimilarity(m)) return !(n.raw < nb.threshold);
        if (m == Measure::CONFUSION) return !(n.raw > nb.threshold);
        return !(n.weight > nb.threshold);
      });
    }
    if (nb.limits_count() && all.size() > nb.k) all.resize(nb.k);
    return all;
  }

  SimilarityProfile build_profile(WordId target, const WeightConfig& config) const {
    return {target, select(target, config)};
  }

 private:
  void check_defined(WordId w) const {
    if (w >= base_rows_.size()) throw LookupError("noun id " + std::to_string(w) + " out of range");
    if (!base_->defined(w)) {
      throw UndefinedConditionalError("noun id " + std::to_string(w) + " has no base-model row");
    }
  }

  const BaseModel* base_;
  const MleModel* mle_;
  const KatzModel* smoothed_;
  std::vector<WordId> candidates_;
  std::vector<SparseDistribution> base_rows_;
  std::vector<SparseDistribution> mle_rows_;
  mutable std::mutex mu_;
  mutable std::map<std::pair<Measure, WordId>, std::vector<Neighbor>> memo_;
};

}  // namespace simlm
