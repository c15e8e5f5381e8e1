// Copyright 2026 The sparsetopic Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Bag-of-words ingestion: vocabulary building, train/test splitting, and the
// per-document half split used by held-out perplexity. A built Corpus is
// immutable and safe to share across workers.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

namespace sparsetopic {

struct Vocabulary {
  std::vector<std::string> terms;            // id -> term
  std::unordered_map<std::string, int> index;  // term -> id

  int size() const { return static_cast<int>(terms.size()); }
  // -1 when absent.
  int lookup(const std::string& term) const {
    auto it = index.find(term);
    return it == index.end() ? -1 : it->second;
  }
};

struct BowDocument {
  // (term id, count), term ids ascending, counts positive.
  std::vector<std::pair<int, int>> counts;
  std::int64_t length = 0;  // total token count

  bool empty() const { return counts.empty(); }
};

struct Corpus {
  std::vector<BowDocument> docs;
  Vocabulary vocab;
  // Documents that became empty under the frequency filter and were dropped.
  std::int64_t empty_docs_dropped = 0;
};

struct SplitDocument {
  BowDocument observed;  // scored half fed to the encoder
  BowDocument heldout;   // half whose tokens the model must predict
};

// Tokenize one line: whitespace split, ASCII lowercase. No stemming, no
// stop words.
std::vector<std::string> tokenize(const std::string& line);

// Build a corpus from pre-tokenized documents. Vocabulary keeps tokens with
// total corpus frequency >= min_count, truncated to the max_vocab most
// frequent (ties broken lexicographically). Term ids are assigned by
// descending frequency, then lexicographic. Documents that become empty are
// dropped (counted in empty_docs_dropped); order is otherwise preserved.
Corpus build_corpus(const std::vector<std::vector<std::string>>& lines,
                    int min_count, int max_vocab);

// Same, reading one document per line from a UTF-8 text file.
Corpus build_corpus_from_text_file(const std::string& path, int min_count,
                                   int max_vocab);

struct SplitResult {
  Corpus train;
  std::vector<SplitDocument> test;
};

// Selects round(test_fraction * |D|) test documents by a seeded shuffle,
// then splits each token-wise: the token multiset is shuffled and assigned
// alternately to observed/heldout, so the two halves differ in length by at
// most one.
SplitResult split_heldout(const Corpus& corpus, double test_fraction,
                          std::uint64_t seed);

// Merge the two halves back into the original document.
BowDocument merge_split(const SplitDocument& s);

// BoW file format: one document per line, "termid:count" entries separated
// by single spaces, term ids ascending. Vocabulary file: one term per line,
// line number = id. Round trips are byte-exact.
void save_bow(const Corpus& corpus, const std::string& bow_path,
              const std::string& vocab_path);
Corpus load_bow(const std::string& bow_path, const std::string& vocab_path);

void write_bow(const Corpus& corpus, std::ostream& bow_out,
               std::ostream& vocab_out);
Corpus read_bow(std::istream& bow_in, std::istream& vocab_in);

}  // namespace sparsetopic
