// estimate_demo.cpp
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
// Loads a pair file (demo/toy_pairs.tsv by default), prints the closest
// nouns to "plan" under each measure and compares back-off and
// similarity-based estimates for the verbs "plan" was never seen with.

#include <iomanip>
#include <iostream>
#include <memory>
#include <string>

#include "simlm/simlm.hpp"

int main(int argc, char** argv) {
  using namespace simlm;
  const std::string path = argc > 1 ? argv[1] : SIMLM_DEMO_DATA;
  const std::string target = argc > 2 ? argv[2] : "plan";

  auto corpus = std::make_shared<const PairCorpus>(load_corpus(path));
  const auto suite = make_suite(BaseModelId::MLE_1, corpus, 5);
  const auto w1 = corpus->nouns().find(target);
  if (!w1) {
    std::cerr << "unknown noun " << target << "\n";
    return 3;
  }

  std::cout << std::fixed << std::setprecision(4);
  for (Measure m : {Measure::KL, Measure::AVG, Measure::L1, Measure::CONFUSION}) {
    const WeightConfig cfg{m, 4.0, Neighborhood::top_k(3), 0};
    std::cout << to_string(m) << ":";
    for (const auto& n : suite->engine().select(*w1, cfg)) {
      std::cout << "  " << corpus->nouns().word(n.id) << " (" << n.raw << ")";
    }
    std::cout << "\n";
  }

  const auto est = SimEstimator::from_engine(suite->engine(), suite->katz(),
                                             WeightConfig{Measure::AVG, 4.0, Neighborhood::all(), 0});
  std::cout << "\nverb        back-off  similarity\n";
  for (WordId v = 0; v < corpus->verbs().size(); ++v) {
    if (est.seen(*w1, v)) continue;
    std::cout << std::left << std::setw(12) << corpus->verbs().word(v) << std::right << std::setw(8)
              << suite->katz().prob(*w1, v) << std::setw(12) << est.p_hat(*w1, v) << "\n";
  }
  return 0;
}
