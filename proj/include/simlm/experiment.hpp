// experiment.hpp
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
// Run configuration, the end-to-end disambiguation experiment, and the
// TSV/JSON report formats.

#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "simlm/basemodel.hpp"
#include "simlm/corpus.hpp"
#include "simlm/errors.hpp"
#include "simlm/evaluation.hpp"
#include "simlm/similarity.hpp"

namespace simlm {

inline constexpr int kReportVersion = 1;

// Shortest decimal form that round-trips.
inline std::string format_double(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

inline std::vector<double> default_beta_grid() {
  std::vector<double> grid;
  for (int i = 1; i <= 60; ++i) grid.push_back(0.5 * i);
  return grid;
}

namespace detail {

template <typename Parse>
auto parse_name_list(const nlohmann::json& value, Parse parse, const char* what) {
  std::vector<typename decltype(parse(std::string_view{}))::value_type> out;
  for (const auto& item : value) {
    const auto s = item.get<std::string>();
    auto parsed = parse(s);
    if (!parsed) throw ConfigError(std::string("unknown ") + what + " '" + s + "'");
    out.push_back(*parsed);
  }
  return out;
}

}  // namespace detail

struct RunConfig {
  std::string input;
  double train_fraction = 0.8;
  std::size_t folds = 5;
  std::uint64_t seed = 0;
  std::vector<BaseModelId> base_models{std::begin(kAllBaseModels), std::end(kAllBaseModels)};
  std::vector<Method> methods{std::begin(kAllMethods), std::end(kAllMethods)};
  std::vector<double> beta_grid = default_beta_grid();
  Neighborhood neighborhood;
  double gamma = 0.0;
  unsigned gt_cutoff = 5;
  // Execution and output settings; they never change report contents.
  std::size_t jobs = 1;
  std::string out;
  std::string format = "both";

  void validate() const {
    SplitSpec{train_fraction, folds, seed}.validate();
    if (base_models.empty()) throw ConfigError("no base models selected");
    if (methods.empty()) throw ConfigError("no methods selected");
    const bool tunable = std::any_of(methods.begin(), methods.end(), [](Method m) { return is_tunable(m); });
    if (tunable && beta_grid.empty()) throw ConfigError("beta grid is empty but a tunable method is selected");
    normalize_beta_grid(beta_grid);
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in [0, 1]");
    if (neighborhood.limits_count() && neighborhood.k < 1) throw ConfigError("neighborhood k must be >= 1");
    if (jobs < 1) throw ConfigError("jobs must be >= 1");
    if (format != "tsv" && format != "json" && format != "both") {
      throw ConfigError("format must be tsv, json or both");
    }
  }

  // Settings that determine the report, in a fixed key order.
  nlohmann::ordered_json experiment_json() const {
    nlohmann::ordered_json j;
    j["input"] = input;
    j["train_fraction"] = train_fraction;
    j["folds"] = folds;
    j["seed"] = seed;
    auto& bm = j["models"] = nlohmann::ordered_json::array();
    for (auto b : base_models) bm.push_back(std::string(to_string(b)));
    auto& ms = j["methods"] = nlohmann::ordered_json::array();
    for (auto m : methods) ms.push_back(std::string(to_string(m)));
    j["beta_grid"] = beta_grid;
    j["neighborhood"] = neighborhood.to_string();
    j["gamma"] = gamma;
    j["gt_cutoff"] = gt_cutoff;
    return j;
  }

  nlohmann::ordered_json to_json() const {
    auto j = experiment_json();
    j["jobs"] = jobs;
    j["out"] = out;
    j["format"] = format;
    return j;
  }

  // Keys absent from j keep their current values.
  void merge_json(const nlohmann::json& j) {
    try {
      for (const auto& [key, value] : j.items()) {
        if (key == "input") input = value.get<std::string>();
        else if (key == "train_fraction") train_fraction = value.get<double>();
        else if (key == "folds") folds = value.get<std::size_t>();
        else if (key == "seed") seed = value.get<std::uint64_t>();
        else if (key == "models") base_models = detail::parse_name_list(value, parse_base_model, "model");
        else if (key == "methods") methods = detail::parse_name_list(value, parse_method, "method");
        else if (key == "beta_grid") beta_grid = value.get<std::vector<double>>();
        else if (key == "neighborhood") neighborhood = Neighborhood::parse(value.get<std::string>());
        else if (key == "gamma") gamma = value.get<double>();
        else if (key == "gt_cutoff") gt_cutoff = value.get<unsigned>();
        else if (key == "jobs") jobs = value.get<std::size_t>();
        else if (key == "out") out = value.get<std::string>();
        else if (key == "format") format = value.get<std::string>();
        else throw ConfigError("unknown config key '" + key + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("bad config value: ") + e.what());
    }
  }

  static RunConfig from_json(const nlohmann::json& j) {
    RunConfig c;
    c.merge_json(j);
    return c;
  }

};

struct DroppedTrials {
  std::size_t uncovered_verb = 0;   // verb in no pseudo-word
  std::size_t seen_decoy = 0;       // decoy pair occurs in training
  std::size_t undefined_noun = 0;   // noun has no counts once singletons are removed
};

// Training corpus, pseudo-words and folds shared by every base model.
struct ExperimentData {
  CorpusPtr train;
  CorpusPtr train_without_singletons;
  std::size_t test_occurrences = 0;
  std::size_t discarded_seen = 0;
  PseudoWordMap pseudowords;
  DroppedTrials dropped;
  std::vector<std::vector<Trial>> folds;
};

// Turns unseen test occurrences into trials. Trials keep only pairs whose
// decoy is also unseen, and nouns that still have counts after singleton
// removal, so every base model is scored on the same trials.
inline ExperimentData prepare_experiment(PairCorpus train, std::span<const Occurrence> test, const RunConfig& config,
                                         std::size_t discarded_seen = 0) {
  config.validate();
  ExperimentData d;
  d.train = std::make_shared<const PairCorpus>(std::move(train));
  d.train_without_singletons = std::make_shared<const PairCorpus>(strip_singletons(*d.train));
  d.test_occurrences = test.size();
  d.discarded_seen = discarded_seen;
  d.pseudowords = build_pseudowords(d.train->col_totals());

  std::vector<Trial> trials;
  for (const auto& o : test) {
    if (d.train->count(o.noun, o.verb) > 0) throw ConfigError("test pair also occurs in training");
    if (!d.pseudowords.covers(o.verb)) {
      ++d.dropped.uncovered_verb;
      continue;
    }
    const WordId decoy = d.pseudowords.lookup(o.verb);
    if (d.train->count(o.noun, decoy) > 0) {
      ++d.dropped.seen_decoy;
      continue;
    }
    if (d.train_without_singletons->row_total(o.noun) == 0) {
      ++d.dropped.undefined_noun;
      continue;
    }
    trials.push_back({o.noun, o.verb, decoy});
  }
  d.folds = make_folds(trials, config.folds, config.seed);
  return d;
}

inline ExperimentData prepare_experiment(const PairCorpus& corpus, const RunConfig& config) {
  auto split = split_unseen_test(corpus, {config.train_fraction, config.folds, config.seed});
  return prepare_experiment(std::move(split.train), split.test, config, split.discarded_seen);
}

// Builds the suite for one base model. Models without singletons take their
// Good-Turing statistics from the full training corpus.
inline std::unique_ptr<ModelSuite> make_suite(BaseModelId id, const ExperimentData& data, unsigned gt_cutoff) {
  KatzOptions opts;
  opts.gt_cutoff = gt_cutoff;
  if (without_singletons(id)) {
    opts.count_of_counts = KatzModel::count_of_counts(*data.train);
    return std::make_unique<ModelSuite>(id, data.train_without_singletons, opts);
  }
  return std::make_unique<ModelSuite>(id, data.train, opts);
}

// Same, starting from a single corpus; the singleton-free variant is
// derived on the spot.
inline std::unique_ptr<ModelSuite> make_suite(BaseModelId id, const CorpusPtr& corpus, unsigned gt_cutoff) {
  KatzOptions opts;
  opts.gt_cutoff = gt_cutoff;
  if (without_singletons(id)) {
    opts.count_of_counts = KatzModel::count_of_counts(*corpus);
    return std::make_unique<ModelSuite>(id, std::make_shared<const PairCorpus>(strip_singletons(*corpus)), opts);
  }
  return std::make_unique<ModelSuite>(id, corpus, opts);
}

struct ModelInfo {
  BaseModelId id;
  CorpusStats stats;
  unsigned requested_cutoff;
  unsigned cutoff;
  std::vector<std::string> warnings;
};

struct PairedSummary {
  BaseModelId base;
  Method a;
  Method b;
  PairedDifference diff;
};

struct ExperimentReport {
  RunConfig config;
  CorpusStats train_stats;
  std::size_t test_occurrences = 0;
  std::size_t discarded_seen = 0;
  std::size_t pseudoword_pairs = 0;
  DroppedTrials dropped;
  std::vector<std::size_t> fold_sizes;
  std::vector<ModelInfo> models;
  std::vector<FoldReport> rows;
  std::vector<PairedSummary> paired;

  // Rows for one (base, method), in fold order.
  std::vector<FoldReport> select(BaseModelId base, Method method) const {
    std::vector<FoldReport> out;
    for (const auto& r : rows) {
      if (r.base == base && r.method == method) out.push_back(r);
    }
    return out;
  }

  double mean_error(BaseModelId base, Method method) const {
    const auto rs = select(base, method);
    if (rs.empty()) throw LookupError("no rows for " + std::string(to_string(base)) + "/" +
                                      std::string(to_string(method)));
    double s = 0.0;
    for (const auto& r : rs) s += r.error_rate;
    return s / static_cast<double>(rs.size());
  }
};

inline ExperimentReport run_experiment(const ExperimentData& data, const RunConfig& config) {
  config.validate();
  ExperimentReport rep;
  rep.config = config;
  rep.train_stats = data.train->stats();
  rep.test_occurrences = data.test_occurrences;
  rep.discarded_seen = data.discarded_seen;
  rep.pseudoword_pairs = data.pseudowords.pairs.size();
  rep.dropped = data.dropped;
  for (const auto& f : data.folds) rep.fold_sizes.push_back(f.size());

  std::vector<std::unique_ptr<ModelSuite>> suites(config.base_models.size());
  detail::parallel_for(suites.size(), config.jobs, [&](std::size_t i) {
    suites[i] = make_suite(config.base_models[i], data, config.gt_cutoff);
  });
  std::vector<const ModelSuite*> suite_ptrs;
  for (const auto& s : suites) {
    suite_ptrs.push_back(s.get());
    rep.models.push_back({s->id(), s->corpus().stats(), s->katz().requested_cutoff(), s->katz().cutoff(),
                          s->katz().warnings()});
  }

  CrossValidationOptions opts;
  opts.beta_grid = normalize_beta_grid(config.beta_grid);
  opts.neighborhood = config.neighborhood;
  opts.gamma = config.gamma;
  opts.rand_seed = substream_seed(config.seed, "rand");
  rep.rows = cross_validate(data.folds, config.methods, suite_ptrs, opts, config.jobs);

  const bool has_avg = std::count(config.methods.begin(), config.methods.end(), Method::AVG) > 0;
  if (has_avg) {
    for (auto b : config.base_models) {
      for (Method m : config.methods) {
        if (m == Method::AVG || !measure_of(m)) continue;
        rep.paired.push_back({b, Method::AVG, m, paired_difference(rep.select(b, Method::AVG), rep.select(b, m))});
      }
    }
  }
  return rep;
}

inline ExperimentReport run_experiment(const PairCorpus& corpus, const RunConfig& config) {
  return run_experiment(prepare_experiment(corpus, config), config);
}

inline nlohmann::ordered_json stats_json(const CorpusStats& s) {
  nlohmann::ordered_json j;
  j["nouns"] = s.nouns;
  j["verbs"] = s.verbs;
  j["types"] = s.types;
  j["total_pairs"] = s.total_pairs;
  j["singletons"] = s.singletons;
  return j;
}

inline nlohmann::ordered_json to_json(const ExperimentReport& r) {
  nlohmann::ordered_json j;
  j["schema"] = "simlm-evaluation";
  j["version"] = kReportVersion;
  j["config"] = r.config.experiment_json();
  auto& data = j["data"];
  data["train"] = stats_json(r.train_stats);
  data["test_occurrences"] = r.test_occurrences;
  data["discarded_seen"] = r.discarded_seen;
  data["pseudoword_pairs"] = r.pseudoword_pairs;
  data["dropped"] = {{"uncovered_verb", r.dropped.uncovered_verb},
                     {"seen_decoy", r.dropped.seen_decoy},
                     {"undefined_noun", r.dropped.undefined_noun}};
  data["fold_sizes"] = r.fold_sizes;
  auto& models = j["models"] = nlohmann::ordered_json::array();
  for (const auto& m : r.models) {
    nlohmann::ordered_json mj;
    mj["model"] = std::string(to_string(m.id));
    mj["corpus"] = stats_json(m.stats);
    mj["gt_cutoff_requested"] = m.requested_cutoff;
    mj["gt_cutoff"] = m.cutoff;
    mj["warnings"] = m.warnings;
    models.push_back(std::move(mj));
  }
  auto& rows = j["rows"] = nlohmann::ordered_json::array();
  for (const auto& f : r.rows) {
    nlohmann::ordered_json row;
    row["model"] = std::string(to_string(f.base));
    row["method"] = std::string(to_string(f.method));
    row["fold"] = f.fold + 1;
    row["beta"] = f.beta ? nlohmann::ordered_json(*f.beta) : nlohmann::ordered_json(nullptr);
    row["n"] = f.counts.n;
    row["incorrect"] = f.counts.incorrect;
    row["ties"] = f.counts.ties;
    row["error_rate"] = f.error_rate;
    std::vector<std::size_t> tuning;
    for (auto t : f.tuning_folds) tuning.push_back(t + 1);
    row["tuning_folds"] = tuning;
    rows.push_back(std::move(row));
  }
  auto& paired = j["paired"] = nlohmann::ordered_json::array();
  for (const auto& p : r.paired) {
    nlohmann::ordered_json pj;
    pj["model"] = std::string(to_string(p.base));
    pj["a"] = std::string(to_string(p.a));
    pj["b"] = std::string(to_string(p.b));
    pj["differences"] = p.diff.differences;
    pj["mean"] = p.diff.mean;
    pj["t"] = p.diff.t_statistic ? nlohmann::ordered_json(*p.diff.t_statistic) : nlohmann::ordered_json(nullptr);
    pj["zero_variance"] = p.diff.zero_variance;
    paired.push_back(std::move(pj));
  }
  return j;
}

inline std::string to_json_string(const ExperimentReport& r) { return to_json(r).dump(2) + "\n"; }

// Comment header carries the schema and the embedded config; then one row
// per (model, method, fold).
inline std::string to_tsv(const ExperimentReport& r) {
  std::ostringstream out;
  out << "# simlm-evaluation\tversion " << kReportVersion << '\n';
  out << "# config\t" << r.config.experiment_json().dump() << '\n';
  out << "model\tmethod\tfold\tbeta\tn\tincorrect\tties\terror_rate\n";
  for (const auto& f : r.rows) {
    out << to_string(f.base) << '\t' << to_string(f.method) << '\t' << f.fold + 1 << '\t'
        << (f.beta ? format_double(*f.beta) : std::string("-")) << '\t' << f.counts.n << '\t'
        << f.counts.incorrect << '\t' << f.counts.ties << '\t' << format_double(f.error_rate) << '\n';
  }
  for (const auto& p : r.paired) {
    out << "# paired\t" << to_string(p.base) << '\t' << to_string(p.a) << '-' << to_string(p.b) << "\tmean "
        << format_double(p.diff.mean) << "\tt "
        << (p.diff.t_statistic ? format_double(*p.diff.t_statistic) : std::string("undefined")) << '\n';
  }
  return out.str();
}

// Corpus and discount diagnostics for one Katz model.
inline nlohmann::ordered_json model_summary_json(const KatzModel& katz) {
  const auto& c = katz.corpus();
  nlohmann::ordered_json j;
  j["corpus"] = stats_json(c.stats());
  const auto& n = katz.count_of_counts();
  nlohmann::ordered_json coc = nlohmann::ordered_json::object();
  for (std::size_t r = 1; r < n.size() && r <= 10; ++r) coc[std::to_string(r)] = n[r];
  j["count_of_counts"] = coc;
  j["gt_cutoff_requested"] = katz.requested_cutoff();
  j["gt_cutoff"] = katz.cutoff();
  nlohmann::ordered_json disc = nlohmann::ordered_json::array();
  for (Count r = 1; r <= katz.cutoff(); ++r) {
    disc.push_back({{"r", r},
                    {"good_turing", katz.good_turing_count(r).value_or(0.0)},
                    {"discount", katz.discount(r)}});
  }
  j["discounts"] = disc;
  std::vector<double> left;
  for (WordId w = 0; w < c.nouns().size(); ++w) {
    if (katz.defined(w)) left.push_back(katz.leftover(w));
  }
  std::sort(left.begin(), left.end());
  nlohmann::ordered_json q = nlohmann::ordered_json::object();
  if (!left.empty()) {
    for (double p : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      const auto idx = static_cast<std::size_t>(p * static_cast<double>(left.size() - 1) + 0.5);
      q[format_double(p)] = left[idx];
    }
  }
  j["leftover_mass_quantiles"] = q;
  j["warnings"] = katz.warnings();
  return j;
}

}  // namespace simlm
