// distribution.hpp
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

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "simlm/corpus.hpp"
#include "simlm/errors.hpp"

namespace simlm {

struct ProbEntry {
  WordId id;
  double p;
  friend bool operator==(const ProbEntry&, const ProbEntry&) = default;
};

// Sparse P(.|w1): ids strictly increasing, probabilities strictly positive.
struct SparseDistribution {
  std::vector<ProbEntry> entries;

  SparseDistribution() = default;
  explicit SparseDistribution(std::vector<ProbEntry> e) : entries(std::move(e)) {}

  std::size_t support_size() const noexcept { return entries.size(); }
  bool empty() const noexcept { return entries.empty(); }

  double mass() const {
    double s = 0.0;
    for (const auto& e : entries) s += e.p;
    return s;
  }

  double at(WordId id) const {
    auto it = std::lower_bound(entries.begin(), entries.end(), id,
                               [](const ProbEntry& e, WordId v) { return e.id < v; });
    return (it != entries.end() && it->id == id) ? it->p : 0.0;
  }

  void validate(double tolerance = 1e-10) const {
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (!(entries[i].p > 0.0)) throw DomainError("non-positive probability in sparse distribution");
      if (i > 0 && entries[i - 1].id >= entries[i].id) {
        throw DomainError("sparse distribution ids not strictly increasing");
      }
    }
    if (std::abs(mass() - 1.0) > tolerance) {
      throw DomainError("sparse distribution mass " + std::to_string(mass()) + " != 1");
    }
  }

  friend bool operator==(const SparseDistribution&, const SparseDistribution&) = default;
};

}  // namespace simlm
