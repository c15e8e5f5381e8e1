// Copyright 2026 The sparsetopic Authors.
// SPDX-License-Identifier: Apache-2.0

#include "corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "error.hpp"
#include "rng.hpp"

namespace sparsetopic {

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char c : line) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) {
        tokens.push_back(std::move(cur));
        cur.clear();
      }
    } else {
      cur.push_back(static_cast<char>(
          std::tolower(static_cast<unsigned char>(c))));
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

Corpus build_corpus(const std::vector<std::vector<std::string>>& lines,
                    int min_count, int max_vocab) {
  if (lines.empty()) {
    fail(ErrorCode::invalid_argument, "build_corpus: no input documents");
  }
  if (min_count < 1) {
    fail(ErrorCode::invalid_argument, "build_corpus: min_count must be >= 1");
  }
  if (max_vocab < 1) {
    fail(ErrorCode::invalid_argument, "build_corpus: max_vocab must be >= 1");
  }

  // Global frequencies; std::map gives lexicographic order for free, which
  // makes the tie-break and id assignment deterministic.
  std::map<std::string, std::int64_t> freq;
  for (const auto& doc : lines) {
    for (const auto& tok : doc) ++freq[tok];
  }

  std::vector<std::pair<std::string, std::int64_t>> kept;
  for (const auto& [term, n] : freq) {
    if (n >= min_count) kept.emplace_back(term, n);
  }
  std::stable_sort(kept.begin(), kept.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (static_cast<int>(kept.size()) > max_vocab) kept.resize(max_vocab);

  Corpus corpus;
  corpus.vocab.terms.reserve(kept.size());
  for (const auto& [term, n] : kept) {
    corpus.vocab.index.emplace(term, corpus.vocab.size());
    corpus.vocab.terms.push_back(term);
  }

  for (const auto& doc : lines) {
    std::map<int, int> counts;
    for (const auto& tok : doc) {
      const int id = corpus.vocab.lookup(tok);
      if (id >= 0) ++counts[id];
    }
    if (counts.empty()) {
      ++corpus.empty_docs_dropped;
      continue;
    }
    BowDocument bow;
    bow.counts.assign(counts.begin(), counts.end());
    for (const auto& [id, c] : bow.counts) bow.length += c;
    corpus.docs.push_back(std::move(bow));
  }

  if (corpus.docs.empty()) {
    fail(ErrorCode::data, "build_corpus: all documents empty after filtering");
  }
  return corpus;
}

Corpus build_corpus_from_text_file(const std::string& path, int min_count,
                                   int max_vocab) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open corpus file: " + path);
  std::vector<std::vector<std::string>> lines;
  std::string line;
  while (std::getline(in, line)) {
    lines.push_back(tokenize(line));
  }
  if (lines.empty()) fail(ErrorCode::data, "corpus file is empty: " + path);
  return build_corpus(lines, min_count, max_vocab);
}

SplitResult split_heldout(const Corpus& corpus, double test_fraction,
                          std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    fail(ErrorCode::invalid_argument,
         "split_heldout: test_fraction must be in (0, 1)");
  }
  const std::int64_t n = static_cast<std::int64_t>(corpus.docs.size());
  if (n < 2) fail(ErrorCode::data, "split_heldout: need at least 2 documents");

  std::int64_t n_test = std::llround(test_fraction * static_cast<double>(n));
  n_test = std::clamp<std::int64_t>(n_test, 1, n - 1);

  Rng rng(seed);
  std::vector<std::int64_t> order(n);
  for (std::int64_t i = 0; i < n; ++i) order[i] = i;
  rng.shuffle(order);

  std::vector<std::int64_t> test_idx(order.begin(), order.begin() + n_test);
  std::sort(test_idx.begin(), test_idx.end());

  std::vector<bool> is_test(n, false);
  for (std::int64_t i : test_idx) is_test[i] = true;

  SplitResult result;
  result.train.vocab = corpus.vocab;
  for (std::int64_t i = 0; i < n; ++i) {
    if (!is_test[i]) result.train.docs.push_back(corpus.docs[i]);
  }

  for (std::int64_t i : test_idx) {
    const BowDocument& doc = corpus.docs[i];
    std::vector<int> tokens;
    tokens.reserve(doc.length);
    for (const auto& [id, c] : doc.counts) {
      for (int k = 0; k < c; ++k) tokens.push_back(id);
    }
    rng.shuffle(tokens);

    std::map<int, int> observed, heldout;
    for (std::size_t t = 0; t < tokens.size(); ++t) {
      if (t % 2 == 0) {
        ++observed[tokens[t]];
      } else {
        ++heldout[tokens[t]];
      }
    }

    SplitDocument split;
    split.observed.counts.assign(observed.begin(), observed.end());
    for (const auto& [id, c] : split.observed.counts) split.observed.length += c;
    split.heldout.counts.assign(heldout.begin(), heldout.end());
    for (const auto& [id, c] : split.heldout.counts) split.heldout.length += c;
    result.test.push_back(std::move(split));
  }
  return result;
}

BowDocument merge_split(const SplitDocument& s) {
  std::map<int, int> counts;
  for (const auto& [id, c] : s.observed.counts) counts[id] += c;
  for (const auto& [id, c] : s.heldout.counts) counts[id] += c;
  BowDocument merged;
  merged.counts.assign(counts.begin(), counts.end());
  for (const auto& [id, c] : merged.counts) merged.length += c;
  return merged;
}

void write_bow(const Corpus& corpus, std::ostream& bow_out,
               std::ostream& vocab_out) {
  for (const auto& term : corpus.vocab.terms) vocab_out << term << '\n';
  for (const auto& doc : corpus.docs) {
    bool first = true;
    for (const auto& [id, c] : doc.counts) {
      if (!first) bow_out << ' ';
      bow_out << id << ':' << c;
      first = false;
    }
    bow_out << '\n';
  }
}

Corpus read_bow(std::istream& bow_in, std::istream& vocab_in) {
  Corpus corpus;
  std::string line;
  while (std::getline(vocab_in, line)) {
    if (line.empty()) fail(ErrorCode::data, "vocabulary file has an empty line");
    corpus.vocab.index.emplace(line, corpus.vocab.size());
    corpus.vocab.terms.push_back(line);
  }
  if (corpus.vocab.size() == 0) {
    fail(ErrorCode::data, "vocabulary file is empty");
  }

  std::int64_t line_no = 0;
  while (std::getline(bow_in, line)) {
    ++line_no;
    BowDocument doc;
    std::istringstream iss(line);
    std::string entry;
    int prev_id = -1;
    while (iss >> entry) {
      const auto colon = entry.find(':');
      if (colon == std::string::npos) {
        fail(ErrorCode::data, "bow line " + std::to_string(line_no) +
                                  ": entry without ':': " + entry);
      }
      int id = 0, count = 0;
      try {
        id = std::stoi(entry.substr(0, colon));
        count = std::stoi(entry.substr(colon + 1));
      } catch (const std::exception&) {
        fail(ErrorCode::data, "bow line " + std::to_string(line_no) +
                                  ": malformed entry: " + entry);
      }
      if (id < 0 || id >= corpus.vocab.size()) {
        fail(ErrorCode::data, "bow line " + std::to_string(line_no) +
                                  ": term id out of range: " + entry);
      }
      if (count <= 0) {
        fail(ErrorCode::data, "bow line " + std::to_string(line_no) +
                                  ": non-positive count: " + entry);
      }
      if (id <= prev_id) {
        fail(ErrorCode::data, "bow line " + std::to_string(line_no) +
                                  ": term ids must be strictly ascending");
      }
      prev_id = id;
      doc.counts.emplace_back(id, count);
      doc.length += count;
    }
    if (!doc.counts.empty()) corpus.docs.push_back(std::move(doc));
  }
  if (corpus.docs.empty()) fail(ErrorCode::data, "bow file has no documents");
  return corpus;
}

void save_bow(const Corpus& corpus, const std::string& bow_path,
              const std::string& vocab_path) {
  std::ofstream bow_out(bow_path, std::ios::binary);
  if (!bow_out) fail(ErrorCode::io, "cannot write bow file: " + bow_path);
  std::ofstream vocab_out(vocab_path, std::ios::binary);
  if (!vocab_out) fail(ErrorCode::io, "cannot write vocab file: " + vocab_path);
  write_bow(corpus, bow_out, vocab_out);
  if (!bow_out.flush() || !vocab_out.flush()) {
    fail(ErrorCode::io, "short write while saving corpus");
  }
}

Corpus load_bow(const std::string& bow_path, const std::string& vocab_path) {
  std::ifstream bow_in(bow_path, std::ios::binary);
  if (!bow_in) fail(ErrorCode::io, "cannot open bow file: " + bow_path);
  std::ifstream vocab_in(vocab_path, std::ios::binary);
  if (!vocab_in) fail(ErrorCode::io, "cannot open vocab file: " + vocab_path);
  return read_bow(bow_in, vocab_in);
}

}  // namespace sparsetopic
