// synthetic.hpp
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
// Block-structured noun/verb corpus with a known latent class structure, for
// end-to-end checks of the disambiguation pipeline.
//
// Nouns and verbs fall into 4 classes; a noun takes verbs of its own class
// `affinity` times more often than others. Each noun class is split into two
// blocks, and every block holds out one verb per verb class: those cells are
// absent from training and make up the test set. Held-out verbs come in
// partner pairs held out by the same blocks, so both verbs of a pair lose
// the same expected mass and end up adjacent in the frequency ranking. That
// makes them pseudo-word partners, and every test trial has an unseen decoy.
//
// Per block of class c (classes are paired 0-1 and 2-3, c' is c's mate):
//   learnable pair  {verb of c, verb of c'}   one verb is in-class
//   cross pair      {verbs of the other two}  both out of class
// Remaining verbs form never-held pairs. Pair popularities are spaced
// geometrically so expected verb frequencies separate the pairs.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "simlm/corpus.hpp"
#include "simlm/errors.hpp"
#include "simlm/rng.hpp"

namespace simlm {

struct BlockCorpusSpec {
  std::size_t nouns_per_class = 10;  // split into two blocks
  std::size_t verbs_per_class = 5;   // at least 4
  double affinity = 10.0;
  std::size_t train_pairs = 20000;
  std::size_t test_pairs = 3000;
  // Ratio between expected frequencies of consecutive pseudo-word pairs.
  double level_ratio = 1.35;
  // Noun popularity ~ 1 / rank^noun_zipf over a seeded random ranking;
  // 0 gives equally frequent nouns.
  double noun_zipf = 0.0;
  // Per-cell multiplicative noise ~ 1 / rank^cell_zipf over a seeded random
  // ranking of cells; 0 disables it.
  double cell_zipf = 0.0;
  std::uint64_t seed = 0;
};

struct SyntheticCorpus {
  PairCorpus train;
  std::vector<Occurrence> test;
  std::vector<std::size_t> noun_class;  // by noun id
  std::vector<std::size_t> verb_class;  // by verb id
  std::vector<std::vector<bool>> held;  // held[noun][verb]
};

inline SyntheticCorpus generate_block_corpus(const BlockCorpusSpec& spec) {
  constexpr std::size_t kClasses = 4;
  if (spec.nouns_per_class < 2) throw ConfigError("need at least two nouns per class");
  if (spec.verbs_per_class < 4) throw ConfigError("need at least four verbs per class");
  if (!(spec.affinity > 0.0) || !(spec.level_ratio > 1.0)) throw ConfigError("bad block corpus parameters");

  const std::size_t n_nouns = kClasses * spec.nouns_per_class;
  const std::size_t n_verbs = kClasses * spec.verbs_per_class;
  SyntheticCorpus out;
  Vocabulary nouns, verbs;
  for (std::size_t c = 0; c < kClasses; ++c) {
    for (std::size_t i = 0; i < spec.nouns_per_class; ++i) {
      nouns.intern("n" + std::to_string(c) + "_" + std::to_string(i));
      out.noun_class.push_back(c);
    }
  }
  for (std::size_t c = 0; c < kClasses; ++c) {
    for (std::size_t j = 0; j < spec.verbs_per_class; ++j) {
      verbs.intern("v" + std::to_string(c) + "_" + std::to_string(j));
      out.verb_class.push_back(c);
    }
  }
  auto verb_id = [&](std::size_t c, std::size_t j) { return c * spec.verbs_per_class + j; };
  auto block_of = [&](std::size_t noun) { return (noun % spec.nouns_per_class) * 2 / spec.nouns_per_class; };

  // Pairs in popularity order: learnable, never-held, cross.
  struct VerbPair {
    std::size_t a, b;
    std::vector<std::pair<std::size_t, std::size_t>> held_by;  // (class, block)
  };
  std::vector<VerbPair> learnable, cross, free_pairs;
  for (std::size_t p = 0; p < 2; ++p) {
    const std::size_t c0 = 2 * p, c1 = 2 * p + 1;
    const std::size_t o0 = 2 * (1 - p), o1 = 2 * (1 - p) + 1;
    for (std::size_t s = 0; s < 2; ++s) {
      learnable.push_back({verb_id(c0, s), verb_id(c1, s), {{c0, s}, {c1, s}}});
      cross.push_back({verb_id(o0, 2 + s), verb_id(o1, 2 + s), {{c0, s}, {c1, s}}});
    }
  }
  for (std::size_t j = 4; j < spec.verbs_per_class; ++j) {
    free_pairs.push_back({verb_id(0, j), verb_id(1, j), {}});
    free_pairs.push_back({verb_id(2, j), verb_id(3, j), {}});
  }
  std::vector<VerbPair> pairs = learnable;
  pairs.insert(pairs.end(), free_pairs.begin(), free_pairs.end());
  pairs.insert(pairs.end(), cross.begin(), cross.end());

  out.held.assign(n_nouns, std::vector<bool>(n_verbs, false));
  for (const auto& vp : pairs) {
    for (auto [c, s] : vp.held_by) {
      for (std::size_t n = 0; n < n_nouns; ++n) {
        if (out.noun_class[n] == c && block_of(n) == s) {
          out.held[n][vp.a] = true;
          out.held[n][vp.b] = true;
        }
      }
    }
  }

  Rng rng(substream_seed(spec.seed, "block-corpus"));
  std::vector<double> noun_weight(n_nouns, 1.0);
  if (spec.noun_zipf > 0.0) {
    std::vector<std::size_t> rank(n_nouns);
    std::iota(rank.begin(), rank.end(), 1);
    rng.shuffle(std::span(rank));
    for (std::size_t n = 0; n < n_nouns; ++n) noun_weight[n] = std::pow(static_cast<double>(rank[n]), -spec.noun_zipf);
  }
  std::vector<double> cell_noise(n_nouns * n_verbs, 1.0);
  if (spec.cell_zipf > 0.0) {
    std::vector<std::size_t> rank(cell_noise.size());
    std::iota(rank.begin(), rank.end(), 1);
    rng.shuffle(std::span(rank));
    for (std::size_t i = 0; i < rank.size(); ++i) cell_noise[i] = std::pow(static_cast<double>(rank[i]), -spec.cell_zipf);
  }
  auto affinity = [&](std::size_t n, std::size_t v) {
    return (out.noun_class[n] == out.verb_class[v] ? spec.affinity : 1.0) * noun_weight[n] * cell_noise[n * n_verbs + v];
  };

  // Scale each pair so its expected training frequency hits its level.
  std::vector<double> verb_scale(n_verbs, 0.0);
  double level = 1.0;
  for (const auto& vp : pairs) {
    for (std::size_t v : {vp.a, vp.b}) {
      double units = 0.0;
      for (std::size_t n = 0; n < n_nouns; ++n) {
        if (!out.held[n][v]) units += affinity(n, v);
      }
      verb_scale[v] = level / units;
    }
    level /= spec.level_ratio;
  }

  auto sample = [&](bool held, std::size_t draws) {
    std::vector<double> cdf;
    std::vector<std::pair<WordId, WordId>> cells;
    double acc = 0.0;
    for (std::size_t n = 0; n < n_nouns; ++n) {
      for (std::size_t v = 0; v < n_verbs; ++v) {
        if (out.held[n][v] != held) continue;
        acc += affinity(n, v) * verb_scale[v];
        cdf.push_back(acc);
        cells.emplace_back(static_cast<WordId>(n), static_cast<WordId>(v));
      }
    }
    std::vector<Occurrence> occ;
    occ.reserve(draws);
    for (std::size_t i = 0; i < draws; ++i) {
      const double u = rng.unit() * acc;
      auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
      const auto k = std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), cells.size() - 1);
      occ.push_back({cells[k].first, cells[k].second});
    }
    return occ;
  };

  PairCorpusBuilder builder;
  builder.nouns() = nouns;
  builder.verbs() = verbs;
  for (const auto& o : sample(false, spec.train_pairs)) builder.add_ids(o.noun, o.verb);
  out.train = builder.build();
  out.test = sample(true, spec.test_pairs);
  return out;
}

}  // namespace simlm
