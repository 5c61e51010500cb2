// evaluation.hpp
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
// Pseudo-word disambiguation: given a noun and the two verbs of a
// pseudo-word, decide which verb the noun was the object of. Error rate is
// (incorrect + ties / 2) / N, folds are scored with beta tuned on the other
// folds.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "simlm/basemodel.hpp"
#include "simlm/corpus.hpp"
#include "simlm/errors.hpp"
#include "simlm/rng.hpp"
#include "simlm/similarity.hpp"

namespace simlm {

// Verbs with positive training frequency, sorted by descending frequency
// (ties by id) and paired off with their neighbour in that order.
struct PseudoWordMap {
  std::vector<std::pair<WordId, WordId>> pairs;
  std::vector<std::optional<WordId>> partner;  // indexed by verb id
  std::optional<WordId> dropped;               // odd verb out, if any

  bool covers(WordId v) const { return v < partner.size() && partner[v].has_value(); }

  WordId lookup(WordId v) const {
    if (!covers(v)) throw LookupError("verb id " + std::to_string(v) + " is not in any pseudo-word");
    return *partner[v];
  }
};

inline PseudoWordMap build_pseudowords(std::span<const Count> verb_totals) {
  std::vector<WordId> verbs;
  for (WordId v = 0; v < verb_totals.size(); ++v) {
    if (verb_totals[v] > 0) verbs.push_back(v);
  }
  if (verbs.size() < 2) throw ConfigError("pseudo-words need at least two verbs with training counts");
  std::stable_sort(verbs.begin(), verbs.end(),
                   [&](WordId a, WordId b) { return verb_totals[a] > verb_totals[b]; });
  PseudoWordMap map;
  map.partner.assign(verb_totals.size(), std::nullopt);
  for (std::size_t i = 0; i + 1 < verbs.size(); i += 2) {
    map.pairs.emplace_back(verbs[i], verbs[i + 1]);
    map.partner[verbs[i]] = verbs[i + 1];
    map.partner[verbs[i + 1]] = verbs[i];
  }
  if (verbs.size() % 2 == 1) map.dropped = verbs.back();
  return map;
}

enum class Decision { Correct, Incorrect, Tie };

inline std::string_view to_string(Decision d) {
  switch (d) {
    case Decision::Correct: return "correct";
    case Decision::Incorrect: return "incorrect";
    case Decision::Tie: return "tie";
  }
  return "?";
}

// Exact comparison: ties are structural (both zero, equal back-off), so no
// epsilon.
inline Decision decide(double correct_score, double decoy_score) {
  if (correct_score > decoy_score) return Decision::Correct;
  if (correct_score < decoy_score) return Decision::Incorrect;
  return Decision::Tie;
}

struct Trial {
  WordId noun;
  WordId correct;
  WordId decoy;
  friend auto operator<=>(const Trial&, const Trial&) = default;
};

struct TrialOutcome {
  Trial trial;
  Decision decision;
  double correct_score;
  double decoy_score;
};

class TrialError : public Error {
 public:
  using Error::Error;
};

template <typename Scorer>
  requires std::invocable<const Scorer&, WordId, WordId>
TrialOutcome run_trial(WordId noun, WordId correct, const PseudoWordMap& map, const Scorer& scorer) {
  const WordId decoy = map.lookup(correct);
  double a, b;
  try {
    a = scorer(noun, correct);
    b = scorer(noun, decoy);
  } catch (const std::exception& e) {
    throw TrialError("trial (noun " + std::to_string(noun) + ", verb " + std::to_string(correct) +
                     " vs " + std::to_string(decoy) + "): " + e.what());
  }
  return {{noun, correct, decoy}, decide(a, b), a, b};
}

struct ErrorCounts {
  std::uint64_t n = 0;
  std::uint64_t incorrect = 0;
  std::uint64_t ties = 0;

  void add(Decision d) {
    ++n;
    if (d == Decision::Incorrect) ++incorrect;
    if (d == Decision::Tie) ++ties;
  }

  ErrorCounts& operator+=(const ErrorCounts& o) {
    n += o.n;
    incorrect += o.incorrect;
    ties += o.ties;
    return *this;
  }

  // (incorrect + ties / 2) / n with a single rounding.
  double rate() const {
    if (n == 0) throw ConfigError("error rate of an empty outcome list");
    return static_cast<double>(2 * incorrect + ties) / static_cast<double>(2 * n);
  }

  friend bool operator==(const ErrorCounts&, const ErrorCounts&) = default;
};

inline double error_rate(std::span<const TrialOutcome> outcomes) {
  ErrorCounts c;
  for (const auto& o : outcomes) c.add(o.decision);
  return c.rate();
}

enum class Method { MLE, KATZ, RAND, KL, AVG, L1, CONFUSION };

inline constexpr Method kAllMethods[] = {Method::MLE, Method::KATZ, Method::RAND, Method::KL,
                                         Method::AVG, Method::L1,   Method::CONFUSION};

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::MLE: return "MLE";
    case Method::KATZ: return "KATZ";
    case Method::RAND: return "RAND";
    case Method::KL: return "KL";
    case Method::AVG: return "AVG";
    case Method::L1: return "L1";
    case Method::CONFUSION: return "CONFUSION";
  }
  return "?";
}

inline std::optional<Method> parse_method(std::string_view s) {
  for (Method m : kAllMethods) {
    if (s == to_string(m)) return m;
  }
  return std::nullopt;
}

inline std::optional<Measure> measure_of(Method m) {
  switch (m) {
    case Method::RAND: return Measure::RAND;
    case Method::KL: return Measure::KL;
    case Method::AVG: return Measure::AVG;
    case Method::L1: return Measure::L1;
    case Method::CONFUSION: return Measure::CONFUSION;
    default: return std::nullopt;
  }
}

inline bool is_tunable(Method m) {
  auto measure = measure_of(m);
  return measure && is_tunable(*measure);
}

// The four base models: MLE or Katz, trained with or without singletons.
enum class BaseModelId { MLE_1, MLE_O1, BO_1, BO_O1 };

inline constexpr BaseModelId kAllBaseModels[] = {BaseModelId::MLE_1, BaseModelId::MLE_O1,
                                                 BaseModelId::BO_1, BaseModelId::BO_O1};

inline std::string_view to_string(BaseModelId b) {
  switch (b) {
    case BaseModelId::MLE_1: return "MLE-1";
    case BaseModelId::MLE_O1: return "MLE-o1";
    case BaseModelId::BO_1: return "BO-1";
    case BaseModelId::BO_O1: return "BO-o1";
  }
  return "?";
}

inline std::optional<BaseModelId> parse_base_model(std::string_view s) {
  for (BaseModelId b : kAllBaseModels) {
    if (s == to_string(b)) return b;
  }
  return std::nullopt;
}

inline bool without_singletons(BaseModelId b) { return b == BaseModelId::MLE_O1 || b == BaseModelId::BO_O1; }
inline BaseKind kind_of(BaseModelId b) {
  return b == BaseModelId::MLE_1 || b == BaseModelId::MLE_O1 ? BaseKind::MLE : BaseKind::KATZ;
}

// Everything one base model needs: its training corpus variant, both
// estimators over it, the base selected for similarity, and the engine.
class ModelSuite {
 public:
  ModelSuite(BaseModelId id, CorpusPtr corpus, KatzOptions katz_options)
      : id_(id),
        corpus_(std::move(corpus)),
        mle_(corpus_),
        katz_(KatzModel::build(corpus_, std::move(katz_options))),
        base_(kind_of(id) == BaseKind::MLE ? BaseModel(mle_) : BaseModel(katz_)),
        engine_(base_, mle_, &katz_) {}

  ModelSuite(const ModelSuite&) = delete;
  ModelSuite& operator=(const ModelSuite&) = delete;

  BaseModelId id() const noexcept { return id_; }
  const PairCorpus& corpus() const noexcept { return *corpus_; }
  const MleModel& mle() const noexcept { return mle_; }
  const KatzModel& katz() const noexcept { return katz_; }
  const BaseModel& base() const noexcept { return base_; }
  const SimilarityEngine& engine() const noexcept { return engine_; }

 private:
  BaseModelId id_;
  CorpusPtr corpus_;
  MleModel mle_;
  KatzModel katz_;
  BaseModel base_;
  SimilarityEngine engine_;
};

struct FoldReport {
  std::size_t fold = 0;  // 0-based
  BaseModelId base = BaseModelId::MLE_1;
  Method method = Method::MLE;
  std::optional<double> beta;
  ErrorCounts counts;
  double error_rate = 0.0;
  // Folds whose union was used to tune beta; never contains `fold`.
  std::vector<std::size_t> tuning_folds;
};

struct CrossValidationOptions {
  std::vector<double> beta_grid;
  Neighborhood neighborhood;
  double gamma = 0.0;
  std::uint64_t rand_seed = 0;
};

namespace detail {

// Runs fn(i) for i in [0, n) on up to `jobs` threads. The first exception
// is rethrown after all workers finish.
inline void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, n));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::thread> workers;
  for (std::size_t t = 0; t < jobs; ++t) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < n && !failed; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mu);
          if (!error) error = std::current_exception();
          failed = true;
        }
      }
    });
  }
  for (auto& w : workers) w.join();
  if (error) std::rethrow_exception(error);
}

// Per-fold error counts of one scoring configuration.
using FoldCounts = std::vector<ErrorCounts>;

template <typename Scorer>
FoldCounts score_folds(std::span<const std::vector<Trial>> folds, const Scorer& scorer) {
  FoldCounts counts(folds.size());
  for (std::size_t f = 0; f < folds.size(); ++f) {
    for (const auto& t : folds[f]) {
      double a, b;
      try {
        a = scorer(t.noun, t.correct);
        b = scorer(t.noun, t.decoy);
      } catch (const std::exception& e) {
        throw TrialError("trial (noun " + std::to_string(t.noun) + ", verb " + std::to_string(t.correct) +
                         " vs " + std::to_string(t.decoy) + "): " + e.what());
      }
      counts[f].add(decide(a, b));
    }
  }
  return counts;
}

// Scores similarity methods for every beta at once. Trials are grouped by
// noun so each neighbourhood and the neighbours' probabilities for the verbs
// in play are computed once.
class SimilarityScorer {
 public:
  SimilarityScorer(const ModelSuite& suite, Measure measure, const CrossValidationOptions& options,
                   std::span<const std::vector<Trial>> folds)
      : suite_(suite), measure_(measure), options_(options), folds_(folds) {
    for (std::size_t f = 0; f < folds.size(); ++f) {
      for (std::size_t i = 0; i < folds[f].size(); ++i) by_noun_[folds[f][i].noun].push_back({f, i});
    }
  }

  // counts[g][f]: error counts on fold f with beta_grid[g] (one entry when
  // the measure takes no beta).
  std::vector<FoldCounts> run(std::span<const double> betas) const {
    const std::size_t n_cfg = betas.empty() ? 1 : betas.size();
    std::vector<FoldCounts> counts(n_cfg, FoldCounts(folds_.size()));
    WeightConfig cfg{measure_, 1.0, options_.neighborhood, options_.rand_seed};
    const auto& base = suite_.base();

    for (const auto& [noun, refs] : by_noun_) {
      const auto neighbors = suite_.engine().select(noun, cfg);

      // Verbs this noun is tested on, and P(v | neighbour) for each.
      std::vector<WordId> verbs;
      for (const auto& r : refs) {
        const auto& t = folds_[r.fold][r.index];
        verbs.push_back(t.correct);
        verbs.push_back(t.decoy);
      }
      std::sort(verbs.begin(), verbs.end());
      verbs.erase(std::unique(verbs.begin(), verbs.end()), verbs.end());
      std::vector<std::vector<double>> probs(verbs.size(), std::vector<double>(neighbors.size()));
      for (std::size_t v = 0; v < verbs.size(); ++v) {
        for (std::size_t i = 0; i < neighbors.size(); ++i) probs[v][i] = base.prob(neighbors[i].id, verbs[v]);
      }
      auto verb_index = [&](WordId v) {
        return static_cast<std::size_t>(std::lower_bound(verbs.begin(), verbs.end(), v) - verbs.begin());
      };

      // RAND draws fresh weights for every fold.
      std::vector<std::size_t> passes{kAllFolds};
      if (measure_ == Measure::RAND) {
        passes.clear();
        for (const auto& r : refs) passes.push_back(r.fold);
        std::sort(passes.begin(), passes.end());
        passes.erase(std::unique(passes.begin(), passes.end()), passes.end());
      }

      for (std::size_t g = 0; g < n_cfg; ++g) {
        if (!betas.empty()) cfg.beta = betas[g];
        for (std::size_t pass : passes) {
          if (pass != kAllFolds) cfg.seed = substream_seed(options_.rand_seed, "fold-" + std::to_string(pass));
          const auto w = ranking_weights(cfg, neighbors, noun);
          double total = 0.0;
          for (double x : w) total += x;
          std::vector<double> score(verbs.size(), 0.0);
          for (std::size_t v = 0; v < verbs.size(); ++v) {
            double s = 0.0;
            if (options_.gamma == 0.0) {
              for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * probs[v][i];
            } else if (total > 0.0) {
              for (std::size_t i = 0; i < w.size(); ++i) s += (w[i] / total) * probs[v][i];
              s = options_.gamma * base.unigram(verbs[v]) + (1.0 - options_.gamma) * s;
            } else {
              s = options_.gamma * base.unigram(verbs[v]);
            }
            score[v] = s;
          }
          for (const auto& r : refs) {
            if (pass != kAllFolds && r.fold != pass) continue;
            const auto& t = folds_[r.fold][r.index];
            counts[g][r.fold].add(decide(score[verb_index(t.correct)], score[verb_index(t.decoy)]));
          }
        }
      }
    }
    return counts;
  }

 private:
  static constexpr std::size_t kAllFolds = static_cast<std::size_t>(-1);

  struct Ref {
    std::size_t fold;
    std::size_t index;
  };

  const ModelSuite& suite_;
  Measure measure_;
  const CrossValidationOptions& options_;
  std::span<const std::vector<Trial>> folds_;
  std::map<WordId, std::vector<Ref>> by_noun_;
};

// Index of the beta minimising error on the union of tuning folds; the grid
// is ascending, so the first minimum is the smallest beta.
inline std::size_t tune_beta(const std::vector<FoldCounts>& per_beta, std::span<const std::size_t> tuning) {
  std::size_t best = 0;
  double best_rate = 2.0;
  for (std::size_t g = 0; g < per_beta.size(); ++g) {
    ErrorCounts c;
    for (std::size_t f : tuning) c += per_beta[g][f];
    const double r = c.rate();
    if (r < best_rate) {
      best_rate = r;
      best = g;
    }
  }
  return best;
}

}  // namespace detail

// Sorted, de-duplicated, all positive.
inline std::vector<double> normalize_beta_grid(std::vector<double> grid) {
  for (double b : grid) {
    if (!(b > 0.0) || !std::isfinite(b)) throw ConfigError("beta grid values must be positive and finite");
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

// Evaluates one method on one base model over all folds. Tunable methods
// pick beta per fold on the union of the other folds.
inline std::vector<FoldReport> cross_validate_method(const ModelSuite& suite, Method method,
                                                     std::span<const std::vector<Trial>> folds,
                                                     const CrossValidationOptions& options) {
  if (folds.size() < 2) throw ConfigError("cross-validation needs at least two folds");
  for (const auto& f : folds) {
    if (f.empty()) throw ConfigError("empty fold");
  }
  const auto grid = normalize_beta_grid(options.beta_grid);
  if (is_tunable(method) && grid.empty()) {
    throw ConfigError("empty beta grid for tunable method " + std::string(to_string(method)));
  }

  std::vector<FoldReport> reports(folds.size());
  for (std::size_t f = 0; f < folds.size(); ++f) {
    reports[f].fold = f;
    reports[f].base = suite.id();
    reports[f].method = method;
    for (std::size_t j = 0; j < folds.size(); ++j) {
      if (j != f) reports[f].tuning_folds.push_back(j);
    }
  }

  detail::FoldCounts direct;
  switch (method) {
    case Method::MLE: {
      const auto& m = suite.mle();
      direct = detail::score_folds(folds, [&](WordId n, WordId v) { return m.prob(n, v); });
      break;
    }
    case Method::KATZ: {
      const auto& m = suite.katz();
      direct = detail::score_folds(folds, [&](WordId n, WordId v) { return m.prob(n, v); });
      break;
    }
    case Method::RAND:
    case Method::CONFUSION: {
      detail::SimilarityScorer scorer(suite, *measure_of(method), options, folds);
      direct = scorer.run({}).front();
      break;
    }
    case Method::KL:
    case Method::AVG:
    case Method::L1: {
      detail::SimilarityScorer scorer(suite, *measure_of(method), options, folds);
      const auto per_beta = scorer.run(grid);
      for (auto& r : reports) {
        const std::size_t g = detail::tune_beta(per_beta, r.tuning_folds);
        r.beta = grid[g];
        r.counts = per_beta[g][r.fold];
        r.error_rate = r.counts.rate();
      }
      return reports;
    }
  }
  for (auto& r : reports) {
    r.counts = direct[r.fold];
    r.error_rate = r.counts.rate();
  }
  return reports;
}

// The full grid of methods x base models, cells run on up to `jobs` threads.
// Output order is suites-major then methods then folds, independent of jobs.
inline std::vector<FoldReport> cross_validate(std::span<const std::vector<Trial>> folds,
                                              std::span<const Method> methods,
                                              std::span<const ModelSuite* const> suites,
                                              const CrossValidationOptions& options, std::size_t jobs = 1) {
  const auto grid = normalize_beta_grid(options.beta_grid);
  for (Method m : methods) {
    if (is_tunable(m) && grid.empty()) {
      throw ConfigError("empty beta grid for tunable method " + std::string(to_string(m)));
    }
  }
  const std::size_t cells = suites.size() * methods.size();
  std::vector<std::vector<FoldReport>> results(cells);
  detail::parallel_for(cells, jobs, [&](std::size_t i) {
    results[i] = cross_validate_method(*suites[i / methods.size()], methods[i % methods.size()], folds, options);
  });
  std::vector<FoldReport> out;
  for (auto& r : results) out.insert(out.end(), r.begin(), r.end());
  return out;
}

struct PairedDifference {
  std::vector<double> differences;  // a - b per fold
  double mean = 0.0;
  std::optional<double> t_statistic;  // unset when the differences have no variance
  bool zero_variance = false;
};

// Per-fold error differences of two methods on the same folds and base model,
// with the paired t statistic mean / (sd / sqrt(k)).
inline PairedDifference paired_difference(std::span<const FoldReport> a, std::span<const FoldReport> b) {
  if (a.size() != b.size() || a.empty()) throw ConfigError("paired difference needs matching, non-empty folds");
  PairedDifference out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].fold != b[i].fold || a[i].counts.n != b[i].counts.n) {
      throw ConfigError("paired difference over mismatched folds");
    }
    if (a[i].base != b[i].base) throw ConfigError("paired difference over different base models");
    out.differences.push_back(a[i].error_rate - b[i].error_rate);
  }
  const double k = static_cast<double>(out.differences.size());
  for (double d : out.differences) out.mean += d;
  out.mean /= k;
  double ss = 0.0;
  for (double d : out.differences) ss += (d - out.mean) * (d - out.mean);
  if (out.differences.size() < 2 || ss == 0.0) {
    out.zero_variance = true;
    return out;
  }
  const double sd = std::sqrt(ss / (k - 1.0));
  out.t_statistic = out.mean / (sd / std::sqrt(k));
  return out;
}

}  // namespace simlm
