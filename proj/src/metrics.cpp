// Copyright 2026 The sparsetopic Authors.
// SPDX-License-Identifier: Apache-2.0

#include "metrics.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace sparsetopic {

namespace {

std::uint64_t pair_key(int a, int b) {
  const std::uint64_t lo = static_cast<std::uint32_t>(std::min(a, b));
  const std::uint64_t hi = static_cast<std::uint32_t>(std::max(a, b));
  return (lo << 32) | hi;
}

}  // namespace

std::int64_t CoocStats::pair_count(int a, int b) const {
  auto it = pair_freq.find(pair_key(a, b));
  return it == pair_freq.end() ? 0 : it->second;
}

CoocStats build_cooc(const Corpus& corpus) {
  if (corpus.docs.empty()) fail(ErrorCode::data, "build_cooc: empty corpus");
  CoocStats stats;
  stats.n_docs = static_cast<std::int64_t>(corpus.docs.size());
  stats.doc_freq.assign(corpus.vocab.size(), 0);
  for (const auto& doc : corpus.docs) {
    for (const auto& [id, c] : doc.counts) ++stats.doc_freq[id];
    for (std::size_t i = 0; i < doc.counts.size(); ++i) {
      for (std::size_t j = i + 1; j < doc.counts.size(); ++j) {
        ++stats.pair_freq[pair_key(doc.counts[i].first, doc.counts[j].first)];
      }
    }
  }
  return stats;
}

double pmi(const CoocStats& stats, std::span<const int> terms) {
  const int n = static_cast<int>(terms.size());
  if (n < 2) fail(ErrorCode::invalid_argument, "pmi: need at least 2 terms");
  for (int i = 0; i < n; ++i) {
    if (terms[i] < 0 || terms[i] >= static_cast<int>(stats.doc_freq.size())) {
      fail(ErrorCode::invalid_argument,
           "pmi: term id out of range: " + std::to_string(terms[i]));
    }
    if (stats.doc_freq[terms[i]] == 0) {
      fail(ErrorCode::data, "pmi: term never occurs in the reference corpus: " +
                                std::to_string(terms[i]));
    }
    for (int j = i + 1; j < n; ++j) {
      if (terms[i] == terms[j]) {
        fail(ErrorCode::invalid_argument, "pmi: duplicate term in top-word list");
      }
    }
  }

  const double nd = static_cast<double>(stats.n_docs);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double p_pair =
          (static_cast<double>(stats.pair_count(terms[i], terms[j])) + 1.0) /
          (nd + 1.0);
      const double p_i = static_cast<double>(stats.doc_freq[terms[i]]) / nd;
      const double p_j = static_cast<double>(stats.doc_freq[terms[j]]) / nd;
      sum += std::log(p_pair / (p_i * p_j));
    }
  }
  return 2.0 / (static_cast<double>(n) * (n - 1)) * sum;
}

PerplexityResult perplexity(const Model& model,
                            std::span<const SplitDocument> test,
                            PerplexityMode mode) {
  if (test.empty()) fail(ErrorCode::invalid_argument, "perplexity: empty test set");

  TopicBasis basis = compute_topic_basis(model.gen, model.cfg.variant);
  DiagGaussian prior;
  prior.mean.assign(model.cfg.latent_dim, model.cfg.prior_mean);
  prior.stddev.assign(model.cfg.latent_dim, model.cfg.prior_sigma);

  PerplexityResult result;
  double loglik_sum = 0.0;
  std::int64_t token_sum = 0;

  for (const auto& split : test) {
    if (split.heldout.empty()) {
      ++result.skipped_docs;
      continue;
    }
    if (split.observed.empty()) {
      fail(ErrorCode::data, "perplexity: test document with empty observed half");
    }

    DocPosterior post = infer_theta(model, split.observed);
    double doc_loglik = 0.0;
    if (model.cfg.variant == Variant::nsmdm) {
      std::vector<double> mix(model.vocab.size(), 0.0);
      for (int k : post.theta.support) {
        axpy(post.theta.values[k], basis.rho.row(k), mix.data(), basis.rho.cols);
      }
      std::vector<double> log_psi = log_softmax(mix);
      for (const auto& [id, c] : split.heldout.counts) {
        doc_loglik += c * log_psi[id];
      }
    } else {
      std::vector<double> psi = decode_nsmtm(basis, post.theta);
      for (const auto& [id, c] : split.heldout.counts) {
        const double p = psi[id];
        if (p > model.cfg.eps_floor) {
          doc_loglik += c * std::log(p);
        } else {
          doc_loglik += c * std::log(model.cfg.eps_floor);
          result.floored_tokens += c;
        }
      }
    }

    if (mode != PerplexityMode::predictive) {
      const double reg = mode == PerplexityMode::bound_rw
                             ? rw_divergence(post.latent, prior)
                             : kl_divergence(post.latent, prior);
      doc_loglik -= reg;
    }

    loglik_sum += doc_loglik;
    token_sum += split.heldout.length;
  }

  if (token_sum == 0) {
    fail(ErrorCode::data, "perplexity: no scorable heldout tokens");
  }
  result.value = std::exp(-loglik_sum / static_cast<double>(token_sum));
  return result;
}

double topic_sparsity_theta(const SparsePoint& theta) {
  const int k = theta.dim();
  if (k < 1) fail(ErrorCode::invalid_argument, "topic_sparsity_theta: empty theta");
  const int zeros = k - static_cast<int>(theta.support.size());
  return static_cast<double>(zeros) / static_cast<double>(k);
}

double topic_sparsity_phi(std::span<const double> row, double threshold) {
  if (row.empty()) fail(ErrorCode::invalid_argument, "topic_sparsity_phi: empty row");
  std::int64_t zeros = 0;
  for (double v : row) {
    if (v <= threshold) ++zeros;
  }
  return static_cast<double>(zeros) / static_cast<double>(row.size());
}

}  // namespace sparsetopic
