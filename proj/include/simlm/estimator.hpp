// estimator.hpp
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
// Similarity-based estimate
//   P_SIM(w2|w1) = sum_{w1' in S(w1)} W(w1,w1') / N(w1) * P(w2|w1')
// embedded in the back-off skeleton: seen pairs keep their discounted
// estimate, unseen pairs get alpha(w1) * P_r(w2|w1) with
//   P_r = gamma * P(w2) + (1 - gamma) * P_SIM.

#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <utility>

#include "simlm/basemodel.hpp"
#include "simlm/errors.hpp"
#include "simlm/similarity.hpp"

namespace simlm {

// Normalized divides by N(w1) and yields probabilities. Unnormalized skips
// the division; it only supports comparing verbs for the same noun.
enum class ScoreMode { Normalized, Unnormalized };

class SimEstimator {
 public:
  using ProfileProvider = std::function<SimilarityProfile(WordId)>;

  // base supplies P(w2|w1') for neighbours, discounting supplies P_d,
  // alpha and the unigram; both must be built on the same corpus.
  SimEstimator(const BaseModel& base, const KatzModel& discounting, ProfileProvider profiles,
               double gamma = 0.0, ScoreMode mode = ScoreMode::Normalized)
      : base_(&base), katz_(&discounting), profiles_(std::move(profiles)), gamma_(gamma), mode_(mode) {
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in [0, 1]");
    if (!profiles_) throw ConfigError("null profile provider");
  }

  // Profiles from a similarity engine under a fixed weight configuration.
  static SimEstimator from_engine(const SimilarityEngine& engine, const KatzModel& discounting,
                                  WeightConfig config, double gamma = 0.0,
                                  ScoreMode mode = ScoreMode::Normalized) {
    config.validate();
    return SimEstimator(engine.base(), discounting,
                        [&engine, config](WordId w1) { return engine.build_profile(w1, config); },
                        gamma, mode);
  }

  double gamma() const noexcept { return gamma_; }
  ScoreMode mode() const noexcept { return mode_; }

  const SimilarityProfile& profile(WordId w1) const {
    {
      std::lock_guard lock(*mu_);
      auto it = cache_.find(w1);
      if (it != cache_.end()) return *it->second;
    }
    auto fresh = std::make_shared<const SimilarityProfile>(profiles_(w1));
    std::lock_guard lock(*mu_);
    return *cache_.try_emplace(w1, std::move(fresh)).first->second;
  }

  double normalizer(WordId w1) const {
    const auto& p = profile(w1);
    const double n = p.normalizer();
    if (p.neighbors.empty() || !(n > 0.0)) {
      throw DegenerateProfileError("similarity profile of noun id " + std::to_string(w1) +
                                   " has no positive weight");
    }
    return n;
  }

  double p_sim(WordId w1, WordId w2) const {
    const auto& p = profile(w1);
    const double n = normalizer(w1);
    double s = 0.0;
    if (mode_ == ScoreMode::Normalized) {
      for (const auto& nb : p.neighbors) {
        if (nb.weight > 0.0) s += (nb.weight / n) * base_->prob(nb.id, w2);
      }
    } else {
      for (const auto& nb : p.neighbors) {
        if (nb.weight > 0.0) s += nb.weight * base_->prob(nb.id, w2);
      }
    }
    return s;
  }

  double p_r(WordId w1, WordId w2) const {
    require_probabilities();
    const double unigram = katz_->unigram(w2);
    if (gamma_ == 1.0) return unigram;
    return gamma_ * unigram + (1.0 - gamma_) * p_sim(w1, w2);
  }

  double p_hat(WordId w1, WordId w2) const {
    require_probabilities();
    if (katz_->seen(w1, w2)) return katz_->discounted(w1, w2);
    return alpha(w1) * p_r(w1, w2);
  }

  // Back-off weight normalizing leftover mass over P_r on the unseen verbs.
  double alpha(WordId w1) const {
    require_probabilities();
    {
      std::lock_guard lock(*mu_);
      auto it = alpha_.find(w1);
      if (it != alpha_.end()) return it->second;
    }
    const double leftover = katz_->leftover(w1);
    double a = 0.0;
    if (katz_->has_unseen_verbs(w1)) {
      double seen_mass = 0.0;
      for (const auto& e : katz_->corpus().row(w1)) seen_mass += p_r(w1, e.id);
      if (leftover > 0.0 && !(1.0 - seen_mass > 0.0)) {
        throw DegenerateProfileError("redistribution model gives no mass to verbs unseen with noun id " +
                                     std::to_string(w1));
      }
      a = detail::backoff_weight(leftover, seen_mass);
    }
    std::lock_guard lock(*mu_);
    return alpha_.try_emplace(w1, a).first->second;
  }

  bool seen(WordId w1, WordId w2) const { return katz_->seen(w1, w2); }

 private:
  void require_probabilities() const {
    if (mode_ != ScoreMode::Normalized) {
      throw ConfigError("ranking-mode estimator does not produce probabilities");
    }
  }

  const BaseModel* base_;
  const KatzModel* katz_;
  ProfileProvider profiles_;
  double gamma_;
  ScoreMode mode_;
  std::unique_ptr<std::mutex> mu_ = std::make_unique<std::mutex>();
  mutable std::unordered_map<WordId, std::shared_ptr<const SimilarityProfile>> cache_;
  mutable std::unordered_map<WordId, double> alpha_;
};

}  // namespace simlm
