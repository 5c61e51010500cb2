// corpus.hpp
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
// Noun/verb pair counts: vocabulary interning, sparse count tables, TSV
// ingestion, snapshots, singleton removal and the train/test/fold splits.

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <compare>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "simlm/errors.hpp"
#include "simlm/rng.hpp"

namespace simlm {

using WordId = std::uint32_t;
using Count = std::uint64_t;

// Append-only bijection between surface strings and dense ids.
class Vocabulary {
 public:
  WordId intern(std::string_view word) {
    auto it = index_.find(std::string(word));
    if (it != index_.end()) return it->second;
    const auto id = static_cast<WordId>(words_.size());
    words_.emplace_back(word);
    index_.emplace(words_.back(), id);
    return id;
  }

  std::optional<WordId> find(std::string_view word) const {
    auto it = index_.find(std::string(word));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  WordId at(std::string_view word) const {
    if (auto id = find(word)) return *id;
    throw LookupError("unknown word '" + std::string(word) + "'");
  }

  const std::string& word(WordId id) const {
    if (id >= words_.size()) {
      throw LookupError("word id " + std::to_string(id) + " out of range");
    }
    return words_[id];
  }

  std::size_t size() const noexcept { return words_.size(); }
  bool empty() const noexcept { return words_.empty(); }
  bool contains(WordId id) const noexcept { return id < words_.size(); }
  const std::vector<std::string>& words() const noexcept { return words_; }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.words_ == b.words_;
  }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, WordId> index_;
};

struct CountEntry {
  WordId id;
  Count count;
  friend bool operator==(const CountEntry&, const CountEntry&) = default;
};

struct PairCount {
  WordId noun;
  WordId verb;
  Count count;
  friend bool operator==(const PairCount&, const PairCount&) = default;
};

struct CorpusStats {
  std::size_t nouns = 0;
  std::size_t verbs = 0;
  std::size_t types = 0;
  Count total_pairs = 0;
  Count singletons = 0;
};

// Immutable sparse table of c(w1, w2) with both marginals. Rows are sorted by
// verb id and columns by noun id; zero counts are never stored.
class PairCorpus {
 public:
  PairCorpus() = default;

  // Duplicate (noun, verb) triples are summed; zero counts are dropped.
  static PairCorpus from_triples(Vocabulary nouns, Vocabulary verbs,
                                 std::vector<PairCount> triples) {
    for (const auto& t : triples) {
      if (!nouns.contains(t.noun) || !verbs.contains(t.verb)) {
        throw LookupError("pair (" + std::to_string(t.noun) + ", " +
                          std::to_string(t.verb) + ") outside vocabulary");
      }
    }
    std::sort(triples.begin(), triples.end(), [](const auto& a, const auto& b) {
      return std::pair(a.noun, a.verb) < std::pair(b.noun, b.verb);
    });

    PairCorpus c;
    c.nouns_ = std::move(nouns);
    c.verbs_ = std::move(verbs);
    const std::size_t n1 = c.nouns_.size();
    const std::size_t n2 = c.verbs_.size();
    c.row_totals_.assign(n1, 0);
    c.col_totals_.assign(n2, 0);
    c.row_offsets_.assign(n1 + 1, 0);

    std::vector<PairCount> merged;
    merged.reserve(triples.size());
    for (const auto& t : triples) {
      if (t.count == 0) continue;
      if (!merged.empty() && merged.back().noun == t.noun && merged.back().verb == t.verb) {
        merged.back().count += t.count;
      } else {
        merged.push_back(t);
      }
    }

    c.row_entries_.reserve(merged.size());
    for (const auto& t : merged) {
      c.row_entries_.push_back({t.verb, t.count});
      ++c.row_offsets_[t.noun + 1];
      c.row_totals_[t.noun] += t.count;
      c.col_totals_[t.verb] += t.count;
      c.total_ += t.count;
      if (t.count == 1) ++c.singletons_;
    }
    for (std::size_t i = 0; i < n1; ++i) c.row_offsets_[i + 1] += c.row_offsets_[i];

    // Transpose. Iterating rows in noun order keeps each column sorted.
    c.col_offsets_.assign(n2 + 1, 0);
    for (const auto& t : merged) ++c.col_offsets_[t.verb + 1];
    for (std::size_t j = 0; j < n2; ++j) c.col_offsets_[j + 1] += c.col_offsets_[j];
    c.col_entries_.resize(merged.size());
    std::vector<std::size_t> fill(c.col_offsets_.begin(), c.col_offsets_.end() - 1);
    for (const auto& t : merged) c.col_entries_[fill[t.verb]++] = {t.noun, t.count};
    return c;
  }

  const Vocabulary& nouns() const noexcept { return nouns_; }
  const Vocabulary& verbs() const noexcept { return verbs_; }

  std::span<const CountEntry> row(WordId noun) const {
    check_noun(noun);
    return {row_entries_.data() + row_offsets_[noun],
            row_entries_.data() + row_offsets_[noun + 1]};
  }

  std::span<const CountEntry> column(WordId verb) const {
    check_verb(verb);
    return {col_entries_.data() + col_offsets_[verb],
            col_entries_.data() + col_offsets_[verb + 1]};
  }

  Count count(WordId noun, WordId verb) const {
    check_verb(verb);
    auto r = row(noun);
    auto it = std::lower_bound(r.begin(), r.end(), verb,
                               [](const CountEntry& e, WordId v) { return e.id < v; });
    return (it != r.end() && it->id == verb) ? it->count : 0;
  }

  Count row_total(WordId noun) const {
    check_noun(noun);
    return row_totals_[noun];
  }
  Count col_total(WordId verb) const {
    check_verb(verb);
    return col_totals_[verb];
  }
  const std::vector<Count>& row_totals() const noexcept { return row_totals_; }
  const std::vector<Count>& col_totals() const noexcept { return col_totals_; }

  Count total() const noexcept { return total_; }
  bool empty() const noexcept { return total_ == 0; }
  std::size_t type_count() const noexcept { return row_entries_.size(); }
  Count singleton_count() const noexcept { return singletons_; }

  CorpusStats stats() const {
    return {nouns_.size(), verbs_.size(), type_count(), total_, singletons_};
  }

  // All stored pairs in (noun, verb) order.
  std::vector<PairCount> triples() const {
    std::vector<PairCount> out;
    out.reserve(row_entries_.size());
    for (WordId n = 0; n < nouns_.size(); ++n) {
      for (const auto& e : row(n)) out.push_back({n, e.id, e.count});
    }
    return out;
  }

  friend bool operator==(const PairCorpus& a, const PairCorpus& b) {
    return a.nouns_ == b.nouns_ && a.verbs_ == b.verbs_ &&
           a.row_offsets_ == b.row_offsets_ && a.row_entries_ == b.row_entries_;
  }

 private:
  void check_noun(WordId n) const {
    if (n >= nouns_.size()) throw LookupError("noun id " + std::to_string(n) + " out of range");
  }
  void check_verb(WordId v) const {
    if (v >= verbs_.size()) throw LookupError("verb id " + std::to_string(v) + " out of range");
  }

  Vocabulary nouns_;
  Vocabulary verbs_;
  std::vector<std::size_t> row_offsets_{0};
  std::vector<CountEntry> row_entries_;
  std::vector<std::size_t> col_offsets_{0};
  std::vector<CountEntry> col_entries_;
  std::vector<Count> row_totals_;
  std::vector<Count> col_totals_;
  Count total_ = 0;
  Count singletons_ = 0;
};

// Accumulates counts by surface form; vocabularies are built in
// first-occurrence order.
class PairCorpusBuilder {
 public:
  void add(std::string_view noun, std::string_view verb, Count count = 1) {
    add_ids(nouns_.intern(noun), verbs_.intern(verb), count);
  }

  void add_ids(WordId noun, WordId verb, Count count = 1) {
    if (count == 0) return;
    const std::uint64_t key = (std::uint64_t{noun} << 32) | verb;
    auto [it, fresh] = counts_.try_emplace(key, count);
    if (!fresh) it->second += count;
  }

  Vocabulary& nouns() noexcept { return nouns_; }
  Vocabulary& verbs() noexcept { return verbs_; }

  PairCorpus build() const {
    std::vector<PairCount> triples;
    triples.reserve(counts_.size());
    for (const auto& [key, c] : counts_) {
      triples.push_back({static_cast<WordId>(key >> 32),
                         static_cast<WordId>(key & 0xffffffffu), c});
    }
    return PairCorpus::from_triples(nouns_, verbs_, std::move(triples));
  }

 private:
  Vocabulary nouns_;
  Vocabulary verbs_;
  std::unordered_map<std::uint64_t, Count> counts_;
};

namespace detail {

inline std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

inline std::optional<Count> parse_count(std::string_view s) {
  Count value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return value;
}

inline void chomp(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace detail

// Reads `noun TAB verb [TAB count]` lines. Blank lines are skipped; repeated
// pairs accumulate.
inline PairCorpus parse_pairs(std::istream& in) {
  PairCorpusBuilder builder;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    detail::chomp(line);
    if (line.empty()) continue;
    const auto fields = detail::split_tabs(line);
    if (fields.size() != 2 && fields.size() != 3) {
      throw ParseError(lineno, "expected 2 or 3 tab-separated fields, got " +
                                   std::to_string(fields.size()));
    }
    if (fields[0].empty() || fields[1].empty()) throw ParseError(lineno, "empty word field");
    Count count = 1;
    if (fields.size() == 3) {
      auto parsed = detail::parse_count(fields[2]);
      if (!parsed) throw ParseError(lineno, "count '" + std::string(fields[2]) + "' is not an integer");
      if (*parsed == 0) throw ParseError(lineno, "count must be positive");
      count = *parsed;
    }
    builder.add(fields[0], fields[1], count);
  }
  if (in.bad()) throw IoError("read failure after line " + std::to_string(lineno));
  return builder.build();
}

inline constexpr std::string_view kSnapshotMagic = "simlm-corpus";
inline constexpr int kSnapshotVersion = 1;

// Text snapshot preserving vocabulary order, including words whose counts
// are zero, so ids survive a round trip.
inline void write_snapshot(std::ostream& out, const PairCorpus& corpus) {
  auto write_vocab = [&](std::string_view tag, const Vocabulary& v) {
    out << tag << '\t' << v.size() << '\n';
    for (const auto& w : v.words()) {
      if (w.find_first_of("\t\n\r") != std::string::npos) {
        throw ConfigError("word '" + w + "' contains a tab or newline");
      }
      out << w << '\n';
    }
  };
  out << kSnapshotMagic << '\t' << kSnapshotVersion << '\n';
  write_vocab("nouns", corpus.nouns());
  write_vocab("verbs", corpus.verbs());
  out << "pairs\t" << corpus.type_count() << '\n';
  for (const auto& t : corpus.triples()) {
    out << t.noun << '\t' << t.verb << '\t' << t.count << '\n';
  }
}

inline PairCorpus read_snapshot(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  auto next = [&]() -> std::string& {
    if (!std::getline(in, line)) throw ParseError(lineno + 1, "truncated snapshot");
    ++lineno;
    detail::chomp(line);
    return line;
  };
  auto header = [&](std::string_view tag) -> Count {
    const auto fields = detail::split_tabs(next());
    if (fields.size() != 2 || fields[0] != tag) {
      throw ParseError(lineno, "expected '" + std::string(tag) + "' header");
    }
    auto n = detail::parse_count(fields[1]);
    if (!n) throw ParseError(lineno, "bad size in '" + std::string(tag) + "' header");
    return *n;
  };

  if (header(kSnapshotMagic) != static_cast<Count>(kSnapshotVersion)) {
    throw ParseError(lineno, "unsupported snapshot version");
  }
  auto read_vocab = [&](std::string_view tag) {
    Vocabulary v;
    const Count n = header(tag);
    for (Count i = 0; i < n; ++i) {
      const auto& w = next();
      if (v.find(w)) throw ParseError(lineno, "duplicate word '" + w + "'");
      v.intern(w);
    }
    return v;
  };
  Vocabulary nouns = read_vocab("nouns");
  Vocabulary verbs = read_vocab("verbs");
  const Count n = header("pairs");
  std::vector<PairCount> triples;
  triples.reserve(n);
  for (Count i = 0; i < n; ++i) {
    const auto fields = detail::split_tabs(next());
    if (fields.size() != 3) throw ParseError(lineno, "expected noun-id, verb-id, count");
    auto a = detail::parse_count(fields[0]);
    auto b = detail::parse_count(fields[1]);
    auto c = detail::parse_count(fields[2]);
    if (!a || !b || !c || *c == 0 || *a >= nouns.size() || *b >= verbs.size()) {
      throw ParseError(lineno, "bad pair record");
    }
    triples.push_back({static_cast<WordId>(*a), static_cast<WordId>(*b), *c});
  }
  return PairCorpus::from_triples(std::move(nouns), std::move(verbs), std::move(triples));
}

// Loads a snapshot or a pair TSV, chosen by the first line.
inline PairCorpus load_corpus(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::string first;
  const auto start = in.tellg();
  std::getline(in, first);
  in.clear();
  in.seekg(start);
  if (first.rfind(kSnapshotMagic, 0) == 0) return read_snapshot(in);
  return parse_pairs(in);
}

inline PairCorpus strip_singletons(const PairCorpus& corpus) {
  auto triples = corpus.triples();
  std::erase_if(triples, [](const PairCount& t) { return t.count == 1; });
  return PairCorpus::from_triples(corpus.nouns(), corpus.verbs(), std::move(triples));
}

struct Occurrence {
  WordId noun;
  WordId verb;
  friend auto operator<=>(const Occurrence&, const Occurrence&) = default;
};

struct SplitSpec {
  double train_fraction = 0.8;
  std::size_t fold_count = 5;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
      throw ConfigError("train fraction must lie in (0, 1)");
    }
    if (fold_count < 2) throw ConfigError("fold count must be at least 2");
  }
};

struct TrainTestSplit {
  PairCorpus train;
  std::vector<Occurrence> test;
  // Held-out occurrences dropped because their type was seen in training.
  std::size_t discarded_seen = 0;
};

// Shuffles pair occurrences, keeps the first round(train_fraction * N) for
// training and returns the remaining occurrences whose type never occurs in
// training. The test list keeps shuffled order and may repeat types.
inline TrainTestSplit split_unseen_test(const PairCorpus& corpus, const SplitSpec& spec) {
  spec.validate();
  if (corpus.empty()) throw ConfigError("cannot split an empty corpus");

  std::vector<Occurrence> occurrences;
  occurrences.reserve(corpus.total());
  for (const auto& t : corpus.triples()) {
    occurrences.insert(occurrences.end(), t.count, Occurrence{t.noun, t.verb});
  }
  Rng rng(substream_seed(spec.seed, "split"));
  rng.shuffle(std::span(occurrences));

  const auto n_train = static_cast<std::size_t>(
      std::llround(spec.train_fraction * static_cast<double>(occurrences.size())));

  PairCorpusBuilder builder;
  builder.nouns() = corpus.nouns();
  builder.verbs() = corpus.verbs();
  for (std::size_t i = 0; i < n_train; ++i) builder.add_ids(occurrences[i].noun, occurrences[i].verb);

  TrainTestSplit out;
  out.train = builder.build();
  for (std::size_t i = n_train; i < occurrences.size(); ++i) {
    const auto& o = occurrences[i];
    if (out.train.count(o.noun, o.verb) > 0) {
      ++out.discarded_seen;
    } else {
      out.test.push_back(o);
    }
  }
  return out;
}

// Seeded partition into k folds whose sizes differ by at most one; the
// remainder goes to the lowest-indexed folds.
template <typename T>
std::vector<std::vector<T>> make_folds(std::span<const T> items, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("fold count must be at least 2");
  if (items.size() < k) {
    throw ConfigError("cannot make " + std::to_string(k) + " folds from " +
                      std::to_string(items.size()) + " items");
  }
  std::vector<std::size_t> order(items.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(substream_seed(seed, "folds"));
  rng.shuffle(std::span(order));

  std::vector<std::vector<T>> folds(k);
  const std::size_t base = items.size() / k;
  const std::size_t extra = items.size() % k;
  std::size_t pos = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t size = base + (f < extra ? 1 : 0);
    folds[f].reserve(size);
    for (std::size_t i = 0; i < size; ++i) folds[f].push_back(items[order[pos++]]);
  }
  return folds;
}

template <typename T>
std::vector<std::vector<T>> make_folds(const std::vector<T>& items, std::size_t k, std::uint64_t seed) {
  return make_folds(std::span<const T>(items), k, seed);
}

}  // namespace simlm
