// Copyright 2026 The sparsetopic Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Evaluation: held-out perplexity (variational-bound and predictive modes),
// PMI topic coherence over document co-occurrence counts, and topic sparsity
// as the fraction of exact zeros.

#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "corpus.hpp"
#include "simplex.hpp"
#include "topicmodel.hpp"

namespace sparsetopic {

struct CoocStats {
  std::vector<std::int64_t> doc_freq;  // term -> documents containing it
  // unordered pair (lo << 32 | hi) -> documents containing both
  std::unordered_map<std::uint64_t, std::int64_t> pair_freq;
  std::int64_t n_docs = 0;

  std::int64_t pair_count(int a, int b) const;
};

// Document-level binary co-occurrence counts; a term appearing twice in one
// document counts once.
CoocStats build_cooc(const Corpus& corpus);

// Average pairwise PMI of the given distinct terms, natural log, with
// add-one smoothing on pair counts: p(wi,wj) = (pair+1)/(n_docs+1),
// p(w) = doc_freq/n_docs. Unknown or never-seen terms are an error.
double pmi(const CoocStats& stats, std::span<const int> terms);

enum class PerplexityMode { bound_rw, bound_kl, predictive };

struct PerplexityResult {
  double value = 0.0;
  std::int64_t floored_tokens = 0;  // heldout tokens scored at the floor (NSMTM)
  std::int64_t skipped_docs = 0;    // test docs with an empty heldout half
};

// exp of the negative mean per-token log-likelihood of the heldout halves,
// with theta inferred from each observed half. The bound modes subtract the
// per-document regularizer (RW or KL against the prior) from the
// log-likelihood before averaging.
PerplexityResult perplexity(const Model& model,
                            std::span<const SplitDocument> test,
                            PerplexityMode mode);

// Fraction of exactly-zero coordinates of theta.
double topic_sparsity_theta(const SparsePoint& theta);

// Fraction of entries <= threshold (default: exact zeros only).
double topic_sparsity_phi(std::span<const double> row, double threshold = 0.0);

}  // namespace sparsetopic
