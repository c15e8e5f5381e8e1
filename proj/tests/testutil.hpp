// Copyright 2026 The sparsetopic Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Shared fixtures for the unit and acceptance suites: synthetic corpora with
// known structure, and small helpers for building models in crafted states.

#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "rng.hpp"
#include "topicmodel.hpp"

namespace testutil {

using namespace sparsetopic;

// Planted-topic corpus: n_topics disjoint word blocks of words_per_topic
// terms each; every document draws its tokens from one or two blocks.
// Term ids are stable ("w000", "w001", ...) so block membership is known.
struct PlantedCorpus {
  Corpus corpus;
  int n_topics = 0;
  int words_per_topic = 0;
  // planted_words[t] = term ids belonging to block t (under corpus.vocab)
  std::vector<std::vector<int>> planted_words;
};

inline std::string planted_term(int id) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "w%03d", id);
  return buf;
}

inline PlantedCorpus make_planted_corpus(int n_topics, int words_per_topic,
                                         int n_docs, int doc_len,
                                         std::uint64_t seed) {
  Rng rng(seed);
  const int vocab = n_topics * words_per_topic;

  // Mild within-block tilt so top-word ranking is informative.
  std::vector<double> block_weights(words_per_topic);
  double wsum = 0.0;
  for (int i = 0; i < words_per_topic; ++i) {
    block_weights[i] = 1.0 / std::pow(i + 1.0, 0.8);
    wsum += block_weights[i];
  }
  for (double& w : block_weights) w /= wsum;

  auto draw_from_block = [&](int block) {
    double u = rng.uniform();
    for (int i = 0; i < words_per_topic; ++i) {
      u -= block_weights[i];
      if (u <= 0.0) return block * words_per_topic + i;
    }
    return block * words_per_topic + words_per_topic - 1;
  };

  std::vector<std::vector<std::string>> lines;
  lines.reserve(n_docs);
  for (int d = 0; d < n_docs; ++d) {
    const bool two = rng.uniform() < 0.5;
    const int t1 = static_cast<int>(rng.below(n_topics));
    int t2 = t1;
    double mix = 1.0;
    if (two) {
      do {
        t2 = static_cast<int>(rng.below(n_topics));
      } while (t2 == t1);
      mix = rng.uniform(0.4, 0.8);
    }
    std::vector<std::string> doc;
    doc.reserve(doc_len);
    for (int i = 0; i < doc_len; ++i) {
      const int block = rng.uniform() < mix ? t1 : t2;
      doc.push_back(planted_term(draw_from_block(block)));
    }
    lines.push_back(std::move(doc));
  }

  PlantedCorpus out;
  out.corpus = build_corpus(lines, 1, vocab);
  out.n_topics = n_topics;
  out.words_per_topic = words_per_topic;
  out.planted_words.assign(n_topics, {});
  for (int t = 0; t < n_topics; ++t) {
    for (int i = 0; i < words_per_topic; ++i) {
      const int id = out.corpus.vocab.lookup(planted_term(t * words_per_topic + i));
      if (id >= 0) out.planted_words[t].push_back(id);
    }
  }
  return out;
}

// Newsgroup-scale synthetic corpus: n_themes themes with disjoint thematic
// word blocks over a shared Zipf-weighted common pool; documents mix one to
// three themes with common-word noise. Gives the co-occurrence structure a
// topic model must beat a unigram baseline on.
inline Corpus make_newsgroup_like_corpus(int n_docs, int vocab_size,
                                         int n_themes, double avg_len,
                                         std::uint64_t seed) {
  Rng rng(seed);
  const int n_common = vocab_size / 10;
  const int thematic = vocab_size - n_common;
  const int per_theme = thematic / n_themes;

  auto zipf_weights = [](int n, double s) {
    std::vector<double> w(n);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      w[i] = 1.0 / std::pow(i + 1.0, s);
      sum += w[i];
    }
    for (double& x : w) x /= sum;
    return w;
  };
  const std::vector<double> common_w = zipf_weights(n_common, 1.05);
  const std::vector<double> theme_w = zipf_weights(per_theme, 0.9);

  auto draw = [&](const std::vector<double>& w) {
    double u = rng.uniform();
    for (std::size_t i = 0; i < w.size(); ++i) {
      u -= w[i];
      if (u <= 0.0) return static_cast<int>(i);
    }
    return static_cast<int>(w.size()) - 1;
  };

  std::vector<std::vector<std::string>> lines;
  lines.reserve(n_docs);
  for (int d = 0; d < n_docs; ++d) {
    // 1-3 themes with geometric-ish mix weights.
    const int k = 1 + static_cast<int>(rng.below(3));
    std::vector<int> themes;
    while (static_cast<int>(themes.size()) < k) {
      const int t = static_cast<int>(rng.below(n_themes));
      bool dup = false;
      for (int u : themes) dup |= (u == t);
      if (!dup) themes.push_back(t);
    }
    std::vector<double> mix(themes.size());
    double msum = 0.0;
    for (std::size_t i = 0; i < mix.size(); ++i) {
      mix[i] = std::pow(0.45, static_cast<double>(i));
      msum += mix[i];
    }
    for (double& x : mix) x /= msum;

    int len = static_cast<int>(avg_len * (0.6 + 0.8 * rng.uniform()));
    len = std::max(len, 5);
    std::vector<std::string> doc;
    doc.reserve(len);
    for (int i = 0; i < len; ++i) {
      if (rng.uniform() < 0.25) {
        doc.push_back("c" + std::to_string(draw(common_w)));
      } else {
        double u = rng.uniform();
        int theme = themes.back();
        for (std::size_t j = 0; j < mix.size(); ++j) {
          u -= mix[j];
          if (u <= 0.0) {
            theme = themes[j];
            break;
          }
        }
        doc.push_back("t" + std::to_string(theme) + "_" +
                      std::to_string(draw(theme_w)));
      }
    }
    lines.push_back(std::move(doc));
  }
  return build_corpus(lines, 1, vocab_size);
}

// Laplace-smoothed unigram baseline perplexity on the heldout halves.
inline double unigram_perplexity(const Corpus& train,
                                 const std::vector<SplitDocument>& test) {
  std::vector<double> counts(train.vocab.size(), 0.0);
  double total = 0.0;
  for (const auto& doc : train.docs) {
    for (const auto& [id, c] : doc.counts) {
      counts[id] += c;
      total += c;
    }
  }
  const double denom = total + static_cast<double>(train.vocab.size());
  double loglik = 0.0;
  std::int64_t tokens = 0;
  for (const auto& split : test) {
    for (const auto& [id, c] : split.heldout.counts) {
      loglik += c * std::log((counts[id] + 1.0) / denom);
      tokens += c;
    }
  }
  return std::exp(-loglik / static_cast<double>(tokens));
}

// Model whose decoded word distribution is exactly uniform for any document:
// zero topic embeddings make every basis row constant.
inline Model make_uniform_model(const Vocabulary& vocab, TrainConfig cfg) {
  Model m = init_model(vocab, cfg);
  m.gen.topic_embed.zero();
  return m;
}

// Scratch directory for file-producing tests.
inline std::string scratch_dir(const std::string& name) {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / ("sparsetopic_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

}  // namespace testutil
