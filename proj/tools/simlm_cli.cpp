// simlm_cli.cpp
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
// Command-line front end: ingest, neighbors, prob, evaluate, synth.
//
// Exit codes: 0 success, 1 internal error, 2 I/O or parse error, 3 usage or
// configuration error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "simlm/simlm.hpp"

namespace {

using namespace simlm;

enum ExitCode { kOk = 0, kInternal = 1, kIo = 2, kUsage = 3 };

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_number(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    const double x = std::stod(s, &used);
    if (used == s.size()) return x;
  } catch (...) {
  }
  throw ConfigError(std::string("bad ") + what + " '" + s + "'");
}

// "0.5,1,2" or "start:stop:step" (inclusive).
std::vector<double> parse_beta_grid(const std::string& s) {
  std::vector<double> grid;
  if (s.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ':')) parts.push_back(item);
    if (parts.size() != 3) throw ConfigError("beta grid range must be start:stop:step");
    const double lo = parse_number(parts[0], "beta"), hi = parse_number(parts[1], "beta"),
                 step = parse_number(parts[2], "beta step");
    if (!(step > 0.0) || hi < lo) throw ConfigError("bad beta grid range '" + s + "'");
    for (std::size_t i = 0;; ++i) {
      const double b = lo + static_cast<double>(i) * step;
      if (b > hi + 1e-9 * step) break;
      grid.push_back(b);
    }
    return grid;
  }
  for (const auto& item : split_list(s)) grid.push_back(parse_number(item, "beta"));
  return grid;
}

template <typename T, typename Parse>
std::vector<T> parse_names(const std::string& s, Parse parse, const char* what) {
  std::vector<T> out;
  for (const auto& item : split_list(s)) {
    auto v = parse(item);
    if (!v) throw ConfigError(std::string("unknown ") + what + " '" + item + "'");
    out.push_back(*v);
  }
  return out;
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

PairCorpus load_input(const std::string& path) {
  try {
    return load_corpus(path);
  } catch (const simlm::ParseError& e) {
    throw IoError(path + ": " + e.what());
  }
}

// Writes every file to a temporary sibling first, then renames, so a failure
// leaves no partial output behind.
void write_files(const std::vector<std::pair<std::string, std::string>>& files) {
  std::vector<std::string> temps;
  try {
    for (const auto& [path, body] : files) {
      const std::string tmp = path + ".partial";
      std::ofstream out(tmp, std::ios::binary);
      if (!out) throw IoError("cannot write " + path);
      temps.push_back(tmp);
      out << body;
      out.close();
      if (!out) throw IoError("cannot write " + path);
    }
    for (std::size_t i = 0; i < files.size(); ++i) std::filesystem::rename(temps[i], files[i].first);
  } catch (...) {
    for (const auto& t : temps) std::remove(t.c_str());
    throw;
  }
}

std::string stats_text(const CorpusStats& s) {
  std::ostringstream out;
  out << "nouns\t" << s.nouns << "\n"
      << "verbs\t" << s.verbs << "\n"
      << "types\t" << s.types << "\n"
      << "pairs\t" << s.total_pairs << "\n"
      << "singletons\t" << s.singletons << "\n"
      << "pairs_without_singletons\t" << (s.total_pairs - s.singletons) << "\n";
  return out.str();
}

// Options shared by neighbors and prob.
struct ModelOptions {
  std::string input;
  std::string model = "MLE-1";
  unsigned gt_cutoff = 5;
  double beta = 10.0;
  std::string neighborhood = "all";
  std::uint64_t seed = 0;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--input", input, "pair file or corpus snapshot")->required();
    cmd->add_option("--model", model, "base model: MLE-1, MLE-o1, BO-1, BO-o1")->capture_default_str();
    cmd->add_option("--gt-cutoff", gt_cutoff, "Good-Turing cutoff")->capture_default_str();
    cmd->add_option("--beta", beta, "weight sharpness")->capture_default_str();
    cmd->add_option("--neighborhood", neighborhood, "all, top:K, threshold:T or top:K,threshold:T")
        ->capture_default_str();
    cmd->add_option("--seed", seed, "seed for RAND weights")->capture_default_str();
  }

  std::unique_ptr<ModelSuite> suite() const {
    auto id = parse_base_model(model);
    if (!id) throw ConfigError("unknown model '" + model + "'");
    auto corpus = std::make_shared<const PairCorpus>(load_input(input));
    return make_suite(*id, corpus, gt_cutoff);
  }

  WeightConfig weights(Measure m) const {
    WeightConfig c{m, beta, Neighborhood::parse(neighborhood), substream_seed(seed, "rand")};
    c.validate();
    return c;
  }
};

WordId lookup(const Vocabulary& v, const std::string& word, const char* what) {
  auto id = v.find(word);
  if (!id) throw LookupError(std::string("unknown ") + what + " '" + word + "'");
  return *id;
}

int run(int argc, char** argv) {
  CLI::App app{"Similarity-based estimation of unseen noun-verb pairs"};
  app.require_subcommand(1);

  // ingest
  std::string ingest_input, ingest_out, ingest_report;
  unsigned ingest_cutoff = 5;
  auto* ingest = app.add_subcommand("ingest", "parse a pair file, print statistics, write a snapshot");
  ingest->add_option("--input", ingest_input, "pair file or snapshot")->required();
  ingest->add_option("--out", ingest_out, "snapshot output path");
  ingest->add_option("--report", ingest_report, "JSON summary of the back-off model");
  ingest->add_option("--gt-cutoff", ingest_cutoff, "Good-Turing cutoff for --report")->capture_default_str();

  // neighbors
  ModelOptions nb_opts;
  std::string nb_word, nb_measures = "AVG";
  std::size_t nb_top = 10;
  auto* neighbors = app.add_subcommand("neighbors", "list the closest nouns to a noun");
  nb_opts.add_to(neighbors);
  neighbors->add_option("--word", nb_word, "target noun")->required();
  neighbors->add_option("--measures", nb_measures, "comma-separated: KL, AVG, L1, CONFUSION, RAND")
      ->capture_default_str();
  neighbors->add_option("--top", nb_top, "rows per measure")->capture_default_str();

  // prob
  ModelOptions pr_opts;
  std::string pr_noun, pr_verb, pr_measure = "AVG";
  double pr_gamma = 0.0;
  auto* prob = app.add_subcommand("prob", "estimate P(verb | noun)");
  pr_opts.add_to(prob);
  prob->add_option("--noun", pr_noun, "conditioning noun")->required();
  prob->add_option("--verb", pr_verb, "predicted verb")->required();
  prob->add_option("--measure", pr_measure, "similarity measure")->capture_default_str();
  prob->add_option("--gamma", pr_gamma, "unigram share of the redistribution model")->capture_default_str();

  // evaluate
  std::string ev_config, ev_input, ev_models, ev_methods, ev_grid, ev_neighborhood, ev_out, ev_format;
  double ev_fraction = 0, ev_gamma = 0;
  std::size_t ev_folds = 0, ev_jobs = 0;
  std::uint64_t ev_seed = 0;
  unsigned ev_cutoff = 0;
  auto* evaluate = app.add_subcommand("evaluate", "run the cross-validated pseudo-word experiment");
  evaluate->add_option("--config", ev_config, "JSON config file; flags override it");
  auto* o_input = evaluate->add_option("--input", ev_input, "pair file or snapshot");
  auto* o_fraction = evaluate->add_option("--train-fraction", ev_fraction, "training share (default 0.8)");
  auto* o_folds = evaluate->add_option("--folds", ev_folds, "cross-validation folds (default 5)");
  auto* o_seed = evaluate->add_option("--seed", ev_seed, "top-level seed (default 0)");
  auto* o_models = evaluate->add_option("--models", ev_models, "comma-separated base models (default all)");
  auto* o_methods = evaluate->add_option("--methods", ev_methods, "comma-separated methods (default all)");
  auto* o_grid = evaluate->add_option("--beta-grid", ev_grid, "list a,b,c or range start:stop:step");
  auto* o_nb = evaluate->add_option("--neighborhood", ev_neighborhood, "neighbourhood policy (default all)");
  auto* o_gamma = evaluate->add_option("--gamma", ev_gamma, "unigram share (default 0)");
  auto* o_cutoff = evaluate->add_option("--gt-cutoff", ev_cutoff, "Good-Turing cutoff (default 5)");
  auto* o_jobs = evaluate->add_option("--jobs", ev_jobs, "worker threads (default 1)");
  auto* o_out = evaluate->add_option("--out", ev_out, "output path prefix; stdout when absent");
  auto* o_format = evaluate->add_option("--format", ev_format, "tsv, json or both (default both)");

  // synth
  BlockCorpusSpec synth_spec;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "write a synthetic block-structured pair file");
  synth->add_option("--out", synth_out, "output pair file")->required();
  synth->add_option("--seed", synth_spec.seed, "generator seed")->capture_default_str();
  synth->add_option("--train-pairs", synth_spec.train_pairs, "training draws")->capture_default_str();
  synth->add_option("--test-pairs", synth_spec.test_pairs, "held-out draws")->capture_default_str();
  synth->add_option("--noun-zipf", synth_spec.noun_zipf, "noun popularity exponent")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::Error& e) {
    app.exit(e);
    return kUsage;
  }

  if (ingest->parsed()) {
    const auto corpus = std::make_shared<const PairCorpus>(load_input(ingest_input));
    std::vector<std::pair<std::string, std::string>> files;
    if (!ingest_out.empty()) {
      std::ostringstream snap;
      write_snapshot(snap, *corpus);
      files.emplace_back(ingest_out, snap.str());
    }
    if (!ingest_report.empty()) {
      KatzOptions opts;
      opts.gt_cutoff = ingest_cutoff;
      const auto katz = KatzModel::build(corpus, opts);
      nlohmann::ordered_json j;
      j["stats"] = stats_json(corpus->stats());
      j["backoff"] = model_summary_json(katz);
      files.emplace_back(ingest_report, j.dump(2) + "\n");
    }
    write_files(files);
    std::cout << stats_text(corpus->stats());
    return kOk;
  }

  if (neighbors->parsed()) {
    const auto measures = parse_names<Measure>(nb_measures, parse_measure, "measure");
    if (measures.empty()) throw ConfigError("no measures selected");
    const auto suite = nb_opts.suite();
    const WordId target = lookup(suite->corpus().nouns(), nb_word, "noun");
    std::ostringstream out;
    out << "measure\trank\tword\traw_value\tweight\n";
    for (Measure m : measures) {
      const auto profile = suite->engine().build_profile(target, nb_opts.weights(m));
      const std::size_t rows = std::min(nb_top, profile.neighbors.size());
      for (std::size_t i = 0; i < rows; ++i) {
        const auto& n = profile.neighbors[i];
        out << to_string(m) << "\t" << (i + 1) << "\t" << suite->corpus().nouns().word(n.id) << "\t"
            << format_double(n.raw) << "\t" << format_double(n.weight) << "\n";
      }
    }
    std::cout << out.str();
    return kOk;
  }

  if (prob->parsed()) {
    const auto m = parse_measure(pr_measure);
    if (!m) throw ConfigError("unknown measure '" + pr_measure + "'");
    const auto suite = pr_opts.suite();
    const WordId n = lookup(suite->corpus().nouns(), pr_noun, "noun");
    const WordId v = lookup(suite->corpus().verbs(), pr_verb, "verb");
    const auto est = SimEstimator::from_engine(suite->engine(), suite->katz(), pr_opts.weights(*m), pr_gamma);
    const bool seen = est.seen(n, v);
    std::ostringstream out;
    out << "noun\t" << pr_noun << "\n"
        << "verb\t" << pr_verb << "\n"
        << "branch\t" << (seen ? "seen" : "unseen") << "\n"
        << "p_hat\t" << format_double(est.p_hat(n, v)) << "\n"
        << "p_backoff\t" << format_double(suite->katz().prob(n, v)) << "\n";
    if (!seen) {
      out << "alpha\t" << format_double(est.alpha(n)) << "\n"
          << "p_r\t" << format_double(est.p_r(n, v)) << "\n";
    }
    std::cout << out.str();
    return kOk;
  }

  if (evaluate->parsed()) {
    RunConfig config;
    if (!ev_config.empty()) config.merge_json(read_json_file(ev_config));
    if (*o_input) config.input = ev_input;
    if (*o_fraction) config.train_fraction = ev_fraction;
    if (*o_folds) config.folds = ev_folds;
    if (*o_seed) config.seed = ev_seed;
    if (*o_models) config.base_models = parse_names<BaseModelId>(ev_models, parse_base_model, "model");
    if (*o_methods) config.methods = parse_names<Method>(ev_methods, parse_method, "method");
    if (*o_grid) config.beta_grid = parse_beta_grid(ev_grid);
    if (*o_nb) config.neighborhood = Neighborhood::parse(ev_neighborhood);
    if (*o_gamma) config.gamma = ev_gamma;
    if (*o_cutoff) config.gt_cutoff = ev_cutoff;
    if (*o_jobs) config.jobs = ev_jobs;
    if (*o_out) config.out = ev_out;
    if (*o_format) config.format = ev_format;
    if (config.input.empty()) throw ConfigError("no input given");
    config.validate();

    const auto corpus = load_input(config.input);
    const auto report = run_experiment(corpus, config);
    const std::string json = to_json_string(report);
    const std::string tsv = to_tsv(report);
    if (config.out.empty()) {
      std::cout << (config.format == "tsv" ? tsv : json);
      return kOk;
    }
    std::vector<std::pair<std::string, std::string>> files;
    if (config.format != "json") files.emplace_back(config.out + ".tsv", tsv);
    if (config.format != "tsv") files.emplace_back(config.out + ".json", json);
    write_files(files);
    return kOk;
  }

  if (synth->parsed()) {
    const auto syn = generate_block_corpus(synth_spec);
    std::ostringstream out;
    for (const auto& t : syn.train.triples()) {
      out << syn.train.nouns().word(t.noun) << "\t" << syn.train.verbs().word(t.verb) << "\t" << t.count << "\n";
    }
    for (const auto& o : syn.test) {
      out << syn.train.nouns().word(o.noun) << "\t" << syn.train.verbs().word(o.verb) << "\n";
    }
    write_files({{synth_out, out.str()}});
    return kOk;
  }
  return kUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const simlm::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const simlm::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const simlm::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const simlm::LookupError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
}
