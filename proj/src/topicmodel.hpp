// Copyright 2026 The sparsetopic Authors.
// SPDX-License-Identifier: Apache-2.0
//
// The two Gaussian-sparsemax generative networks and their training loop.
//
// NSMDM: theta = sparsemax(W^T x), topic rows rho_k = S^T t_k kept
// unnormalized, word distribution psi = softmax(rho^T theta).
// NSMTM: additionally phi_k = sparsemax(rho_k), and psi = phi^T theta is a
// convex combination of sparse simplex rows.
//
// The objective is the negative variational bound: reconstruction negative
// log-likelihood plus gamma times the divergence between the encoder
// posterior and the Gaussian prior. The backward pass propagates the exact
// chain through the decode, the sparsemax Jacobians, the reparameterized
// sample, and the encoder.

#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "corpus.hpp"
#include "gaussian.hpp"
#include "net.hpp"
#include "simplex.hpp"

namespace sparsetopic {

enum class Variant { nsmdm, nsmtm };
enum class RegularizerKind { rw, kl };

struct TrainConfig {
  Variant variant = Variant::nsmtm;
  RegularizerKind regularizer = RegularizerKind::rw;
  int topics = 50;       // K
  int latent_dim = 64;   // d
  int embed_dim = 128;   // width of topic/word embeddings
  int hidden_dim = 256;
  double gamma = 0.5;
  double learning_rate = 1e-3;
  int epochs = 20;
  int batch_size = 64;
  std::uint64_t seed = 1;
  double prior_mean = 0.0;
  double prior_sigma = 1.0;
  double dropout = 0.2;
  double eps_floor = 1e-10;  // floor inside log((phi^T theta)_w), loss only
};

void validate(const TrainConfig& cfg);

struct GenerativeParams {
  Mat projection;   // d x K, maps the latent onto topic space
  Mat topic_embed;  // K x e, one embedding per topic
  Mat word_embed;   // e x |V|, shared word-embedding dictionary
};

struct Model {
  TrainConfig cfg;
  Vocabulary vocab;
  GenerativeParams gen;
  EncoderParams enc;
};

// Deterministic given the seed in cfg.
Model init_model(const Vocabulary& vocab, const TrainConfig& cfg);

// Named flat views, in checkpoint/optimizer order.
ParamSet param_refs(Model& m);

// Per-step topic structure shared by every document in a batch.
struct TopicBasis {
  Variant variant = Variant::nsmdm;
  Mat rho;                       // K x |V|, rows S^T t_k
  std::vector<SparsePoint> phi;  // NSMTM only: sparsemax of each row
};

TopicBasis compute_topic_basis(const GenerativeParams& gen, Variant variant);

// psi = softmax(rho^T theta): strictly positive, sums to 1.
std::vector<double> decode_nsmdm(const TopicBasis& basis, const SparsePoint& theta);
std::vector<double> decode_nsmdm(const GenerativeParams& gen, const SparsePoint& theta);

// psi = phi^T theta: on the simplex, possibly with exact zeros. The floor is
// applied inside the loss only, never here.
std::vector<double> decode_nsmtm(const TopicBasis& basis, const SparsePoint& theta);
std::vector<double> decode_nsmtm(const GenerativeParams& gen, const SparsePoint& theta);

struct ElboResult {
  double loss = 0.0;       // recon_nll + gamma * reg
  double recon_nll = 0.0;  // negative reconstruction log-likelihood
  double reg = 0.0;        // divergence value (before gamma)
};

struct ElboCache {
  BowDocument doc;
  std::vector<double> eps;
  EncoderCache enc_cache;
  DiagGaussian q;
  std::vector<double> latent;   // mu + sigma .* eps
  std::vector<double> preact;   // W^T latent
  SparsePoint theta;
  std::vector<double> log_psi;  // NSMDM
  std::vector<double> psi;      // NSMTM
  ElboResult result;
  std::int64_t floored_tokens = 0;
  std::shared_ptr<const TopicBasis> basis;  // set by the elbo() wrapper
};

// Forward pass for one document against a precomputed basis. eps is the
// standard-normal draw for the reparameterized sample; dropout_uniforms may
// be empty (eval mode).
ElboResult elbo_forward(const TrainConfig& cfg, const TopicBasis& basis,
                        const GenerativeParams& gen, const EncoderParams& enc,
                        const BowDocument& doc, std::span<const double> eps,
                        std::span<const double> dropout_uniforms,
                        ElboCache& cache);

// Spec-facing wrapper: builds the basis itself and stores it in the cache.
ElboResult elbo(const TrainConfig& cfg, const GenerativeParams& gen,
                const EncoderParams& enc, const BowDocument& doc,
                std::span<const double> eps, ElboCache& cache);

struct ModelGrads {
  Mat d_projection;
  Mat d_topic_embed;
  Mat d_word_embed;
  Mat d_basis_rows;  // K x |V|: gradient w.r.t. phi rows (NSMTM) / rho rows (NSMDM)
  EncoderGrads enc;
  bool saw_degenerate_sparsemax = false;

  void init_like(const Model& m);
  void zero();
};

ParamSet grad_refs(ModelGrads& g);

// Accumulates the document's exact gradient into grads: decode path into
// d_projection and d_basis_rows, regularizer and sample path into the
// encoder. d_basis_rows still needs basis_backward to reach the embeddings.
void doc_backward(const TrainConfig& cfg, const TopicBasis& basis,
                  const GenerativeParams& gen, const EncoderParams& enc,
                  const ElboCache& cache, ModelGrads& grads);

// Converts accumulated d_basis_rows into d_topic_embed / d_word_embed,
// applying the per-row sparsemax Jacobian for NSMTM. Call once per batch.
void basis_backward(const TopicBasis& basis, const GenerativeParams& gen,
                    ModelGrads& grads);

// Full per-document gradient (doc_backward + basis_backward); the spec-level
// counterpart of elbo().
void elbo_backward(const TrainConfig& cfg, const GenerativeParams& gen,
                   const EncoderParams& enc, const ElboCache& cache,
                   ModelGrads& grads);

struct TraceRow {
  int epoch = 0;
  int batch = 0;
  double loss = 0.0;
  double recon = 0.0;
  double reg_term = 0.0;  // gamma * divergence, so loss = recon + reg_term
};

struct TrainResult {
  Model model;
  std::vector<TraceRow> trace;
  std::vector<double> epoch_mean_loss;  // per-document mean, one per epoch
  bool diverged = false;
  int diverged_epoch = 0;
  int diverged_batch = 0;
};

// Seeded shuffled minibatches, one Adam step per batch, loss averaged per
// document within a batch. On a non-finite loss or gradient the loop stops
// before applying the step, so the returned model holds the last parameters
// that produced a finite loss.
TrainResult train(const Corpus& corpus, const TrainConfig& cfg);

// Deterministic whole-corpus objective (eps = 0, dropout off); used to
// compare parameter states outside the stochastic loop.
ElboResult mean_full_loss(const Model& model, const Corpus& corpus);

struct DocPosterior {
  DiagGaussian latent;
  SparsePoint theta;
};

// Evaluation-mode posterior: theta = sparsemax(W^T mu(w)), no dropout, no
// sampling.
DocPosterior infer_theta(const Model& model, const BowDocument& doc);

// Top-n terms of topic k: NSMTM by phi_k probability, NSMDM by the
// unnormalized row value; ties broken by term id. n is clamped to |V|
// (clamped set to true if an out parameter is supplied).
std::vector<std::pair<int, double>> top_words(const Model& model, int k, int n,
                                              bool* clamped = nullptr);

}  // namespace sparsetopic
