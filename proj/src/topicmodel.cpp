// Copyright 2026 The sparsetopic Authors.
// SPDX-License-Identifier: Apache-2.0

#include "topicmodel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "error.hpp"

namespace sparsetopic {

void validate(const TrainConfig& cfg) {
  if (cfg.topics < 2) fail(ErrorCode::invalid_argument, "config: topics must be >= 2");
  if (cfg.latent_dim < 1 || cfg.embed_dim < 1 || cfg.hidden_dim < 1) {
    fail(ErrorCode::invalid_argument, "config: dimensions must be >= 1");
  }
  if (!std::isfinite(cfg.gamma) || cfg.gamma < 0.0) {
    fail(ErrorCode::invalid_argument, "config: gamma must be finite and >= 0");
  }
  if (!(cfg.learning_rate > 0.0)) {
    fail(ErrorCode::invalid_argument, "config: learning rate must be > 0");
  }
  if (cfg.epochs < 0) fail(ErrorCode::invalid_argument, "config: epochs must be >= 0");
  if (cfg.batch_size < 1) fail(ErrorCode::invalid_argument, "config: batch size must be >= 1");
  if (!(cfg.prior_sigma > 0.0)) {
    fail(ErrorCode::invalid_argument, "config: prior sigma must be > 0");
  }
  if (!(cfg.dropout >= 0.0 && cfg.dropout < 1.0)) {
    fail(ErrorCode::invalid_argument, "config: dropout must be in [0, 1)");
  }
  if (!(cfg.eps_floor > 0.0)) {
    fail(ErrorCode::invalid_argument, "config: eps_floor must be > 0");
  }
}

Model init_model(const Vocabulary& vocab, const TrainConfig& cfg) {
  validate(cfg);
  if (vocab.size() < 1) fail(ErrorCode::invalid_argument, "init_model: empty vocabulary");
  Model m;
  m.cfg = cfg;
  m.vocab = vocab;
  Rng rng(cfg.seed);
  m.gen.projection = Mat(cfg.latent_dim, cfg.topics);
  m.gen.topic_embed = Mat(cfg.topics, cfg.embed_dim);
  m.gen.word_embed = Mat(cfg.embed_dim, vocab.size());
  glorot_init(m.gen.projection, rng);
  glorot_init(m.gen.topic_embed, rng);
  glorot_init(m.gen.word_embed, rng);
  m.enc = init_encoder(vocab.size(), cfg.hidden_dim, cfg.latent_dim, rng);
  return m;
}

ParamSet param_refs(Model& m) {
  ParamSet refs = {
      {"gen.projection", &m.gen.projection.a},
      {"gen.topic_embed", &m.gen.topic_embed.a},
      {"gen.word_embed", &m.gen.word_embed.a},
  };
  for (auto& r : param_refs(m.enc, "enc")) refs.push_back(r);
  return refs;
}

TopicBasis compute_topic_basis(const GenerativeParams& gen, Variant variant) {
  const int topics = gen.topic_embed.rows;
  const int embed = gen.topic_embed.cols;
  const int vocab = gen.word_embed.cols;
  TopicBasis basis;
  basis.variant = variant;
  basis.rho = Mat(topics, vocab);
  for (int k = 0; k < topics; ++k) {
    double* row = basis.rho.row(k);
    const double* t = gen.topic_embed.row(k);
    for (int a = 0; a < embed; ++a) {
      axpy(t[a], gen.word_embed.row(a), row, vocab);
    }
  }
  if (variant == Variant::nsmtm) {
    basis.phi.reserve(topics);
    for (int k = 0; k < topics; ++k) {
      basis.phi.push_back(sparsemax(std::span(basis.rho.row(k), vocab)));
    }
  }
  return basis;
}

std::vector<double> decode_nsmdm(const TopicBasis& basis, const SparsePoint& theta) {
  const int vocab = basis.rho.cols;
  std::vector<double> mix(vocab, 0.0);
  for (int k : theta.support) {
    axpy(theta.values[k], basis.rho.row(k), mix.data(), vocab);
  }
  return softmax(mix);
}

std::vector<double> decode_nsmdm(const GenerativeParams& gen, const SparsePoint& theta) {
  return decode_nsmdm(compute_topic_basis(gen, Variant::nsmdm), theta);
}

std::vector<double> decode_nsmtm(const TopicBasis& basis, const SparsePoint& theta) {
  const int vocab = basis.rho.cols;
  std::vector<double> psi(vocab, 0.0);
  for (int k : theta.support) {
    axpy(theta.values[k], basis.phi[k].values.data(), psi.data(), vocab);
  }
  return psi;
}

std::vector<double> decode_nsmtm(const GenerativeParams& gen, const SparsePoint& theta) {
  return decode_nsmtm(compute_topic_basis(gen, Variant::nsmtm), theta);
}

namespace {

double regularizer_value(const TrainConfig& cfg, const DiagGaussian& q) {
  DiagGaussian prior;
  prior.mean.assign(q.mean.size(), cfg.prior_mean);
  prior.stddev.assign(q.mean.size(), cfg.prior_sigma);
  return cfg.regularizer == RegularizerKind::rw ? rw_divergence(q, prior)
                                                : kl_divergence(q, prior);
}

}  // namespace

ElboResult elbo_forward(const TrainConfig& cfg, const TopicBasis& basis,
                        const GenerativeParams& gen, const EncoderParams& enc,
                        const BowDocument& doc, std::span<const double> eps,
                        std::span<const double> dropout_uniforms,
                        ElboCache& cache) {
  if (doc.empty()) fail(ErrorCode::invalid_argument, "elbo: empty document");
  if (static_cast<int>(eps.size()) != cfg.latent_dim) {
    fail(ErrorCode::invalid_argument, "elbo: eps dimension mismatch");
  }

  cache.doc = doc;
  cache.eps.assign(eps.begin(), eps.end());
  cache.floored_tokens = 0;

  cache.q = encode_forward(enc, normalize_bow(doc), cfg.dropout,
                           dropout_uniforms, cache.enc_cache);
  cache.latent = sample(cache.q, eps);

  // preact_k = sum_a W[a][k] * latent_a
  const int topics = cfg.topics;
  const int latent_dim = cfg.latent_dim;
  cache.preact.assign(topics, 0.0);
  for (int a = 0; a < latent_dim; ++a) {
    axpy(cache.latent[a], gen.projection.row(a), cache.preact.data(), topics);
  }
  cache.theta = sparsemax(cache.preact);

  double recon_nll = 0.0;
  if (cfg.variant == Variant::nsmdm) {
    const int vocab = basis.rho.cols;
    std::vector<double> mix(vocab, 0.0);
    for (int k : cache.theta.support) {
      axpy(cache.theta.values[k], basis.rho.row(k), mix.data(), vocab);
    }
    cache.log_psi = log_softmax(mix);
    cache.psi.clear();
    for (const auto& [id, c] : doc.counts) recon_nll -= c * cache.log_psi[id];
  } else {
    cache.psi = decode_nsmtm(basis, cache.theta);
    cache.log_psi.clear();
    for (const auto& [id, c] : doc.counts) {
      const double p = cache.psi[id];
      if (p > cfg.eps_floor) {
        recon_nll -= c * std::log(p);
      } else {
        recon_nll -= c * std::log(cfg.eps_floor);
        cache.floored_tokens += c;
      }
    }
  }

  cache.result.recon_nll = recon_nll;
  cache.result.reg = regularizer_value(cfg, cache.q);
  cache.result.loss = recon_nll + cfg.gamma * cache.result.reg;
  if (!std::isfinite(cache.result.loss)) {
    fail(ErrorCode::numeric,
         std::string("elbo: non-finite loss (recon_nll=") +
             std::to_string(recon_nll) +
             ", reg=" + std::to_string(cache.result.reg) + ")");
  }
  return cache.result;
}

ElboResult elbo(const TrainConfig& cfg, const GenerativeParams& gen,
                const EncoderParams& enc, const BowDocument& doc,
                std::span<const double> eps, ElboCache& cache) {
  auto basis = std::make_shared<TopicBasis>(compute_topic_basis(gen, cfg.variant));
  cache.basis = basis;
  return elbo_forward(cfg, *basis, gen, enc, doc, eps, {}, cache);
}

void ModelGrads::init_like(const Model& m) {
  d_projection = Mat(m.gen.projection.rows, m.gen.projection.cols);
  d_topic_embed = Mat(m.gen.topic_embed.rows, m.gen.topic_embed.cols);
  d_word_embed = Mat(m.gen.word_embed.rows, m.gen.word_embed.cols);
  d_basis_rows = Mat(m.gen.topic_embed.rows, m.gen.word_embed.cols);
  enc.init_like(m.enc);
  saw_degenerate_sparsemax = false;
}

void ModelGrads::zero() {
  d_projection.zero();
  d_topic_embed.zero();
  d_word_embed.zero();
  d_basis_rows.zero();
  enc.zero();
  saw_degenerate_sparsemax = false;
}

ParamSet grad_refs(ModelGrads& g) {
  ParamSet refs = {
      {"gen.projection", &g.d_projection.a},
      {"gen.topic_embed", &g.d_topic_embed.a},
      {"gen.word_embed", &g.d_word_embed.a},
  };
  for (auto& r : param_refs(g.enc, "enc")) refs.push_back(r);
  return refs;
}

void doc_backward(const TrainConfig& cfg, const TopicBasis& basis,
                  const GenerativeParams& gen, const EncoderParams& enc,
                  const ElboCache& cache, ModelGrads& grads) {
  const int topics = cfg.topics;
  const int latent_dim = cfg.latent_dim;
  const int vocab = basis.rho.cols;
  const BowDocument& doc = cache.doc;

  std::vector<double> d_theta(topics, 0.0);

  if (cfg.variant == Variant::nsmdm) {
    // d(loss)/d(mix) = N_j * psi - counts, dense over the vocabulary.
    std::vector<double> d_mix(vocab);
    for (int v = 0; v < vocab; ++v) {
      d_mix[v] = static_cast<double>(doc.length) * std::exp(cache.log_psi[v]);
    }
    for (const auto& [id, c] : doc.counts) d_mix[id] -= c;

    for (int k = 0; k < topics; ++k) {
      d_theta[k] = dot(basis.rho.row(k), d_mix.data(), vocab);
    }
    for (int k : cache.theta.support) {
      axpy(cache.theta.values[k], d_mix.data(), grads.d_basis_rows.row(k), vocab);
    }
  } else {
    // d(loss)/d(psi_v) = -c_v / psi_v on observed, unfloored terms.
    for (const auto& [id, c] : doc.counts) {
      const double p = cache.psi[id];
      if (p <= cfg.eps_floor) continue;  // flat region of the floored log
      const double d_psi = -static_cast<double>(c) / p;
      for (int k = 0; k < topics; ++k) {
        d_theta[k] += basis.phi[k].values[id] * d_psi;
      }
      for (int k : cache.theta.support) {
        grads.d_basis_rows.at(k, id) += cache.theta.values[k] * d_psi;
      }
    }
  }

  // Through the theta sparsemax.
  JvpResult d_preact = sparsemax_jvp(cache.theta, d_theta);
  grads.saw_degenerate_sparsemax |= d_preact.degenerate;

  // preact = W^T latent.
  std::vector<double> d_latent(latent_dim);
  for (int a = 0; a < latent_dim; ++a) {
    axpy(cache.latent[a], d_preact.value.data(), grads.d_projection.row(a), topics);
    d_latent[a] = dot(gen.projection.row(a), d_preact.value.data(), topics);
  }

  // Reparameterized sample and the regularizer, into mu and log sigma.
  std::vector<double> d_mu(latent_dim), d_logstd(latent_dim);
  for (int a = 0; a < latent_dim; ++a) {
    d_mu[a] = d_latent[a];
    d_logstd[a] = d_latent[a] * cache.eps[a] * cache.q.stddev[a];
  }
  if (cfg.gamma > 0.0) {
    if (cfg.regularizer == RegularizerKind::rw) {
      for (int a = 0; a < latent_dim; ++a) {
        d_mu[a] += cfg.gamma * 2.0 * (cache.q.mean[a] - cfg.prior_mean);
        d_logstd[a] += cfg.gamma * 2.0 * (cache.q.stddev[a] - cfg.prior_sigma) *
                       cache.q.stddev[a];
      }
    } else {
      const double sp2 = cfg.prior_sigma * cfg.prior_sigma;
      for (int a = 0; a < latent_dim; ++a) {
        const double sq = cache.q.stddev[a];
        d_mu[a] += cfg.gamma * (cache.q.mean[a] - cfg.prior_mean) / sp2;
        d_logstd[a] += cfg.gamma * (sq / sp2 - 1.0 / sq) * sq;
      }
    }
  }

  encode_backward(enc, cache.enc_cache, d_mu, d_logstd, grads.enc);
}

void basis_backward(const TopicBasis& basis, const GenerativeParams& gen,
                    ModelGrads& grads) {
  const int topics = gen.topic_embed.rows;
  const int embed = gen.topic_embed.cols;
  const int vocab = gen.word_embed.cols;

  std::vector<double> d_rho(vocab);
  for (int k = 0; k < topics; ++k) {
    const double* d_row = grads.d_basis_rows.row(k);
    const double* d_rho_ptr = d_row;
    if (basis.variant == Variant::nsmtm) {
      JvpResult jvp = sparsemax_jvp(basis.phi[k], std::span(d_row, vocab));
      grads.saw_degenerate_sparsemax |= jvp.degenerate;
      d_rho = std::move(jvp.value);
      d_rho_ptr = d_rho.data();
    }
    // rho_k = S^T t_k.
    const double* t = gen.topic_embed.row(k);
    double* dt = grads.d_topic_embed.row(k);
    for (int a = 0; a < embed; ++a) {
      dt[a] += dot(gen.word_embed.row(a), d_rho_ptr, vocab);
      axpy(t[a], d_rho_ptr, grads.d_word_embed.row(a), vocab);
    }
  }
  grads.d_basis_rows.zero();
}

void elbo_backward(const TrainConfig& cfg, const GenerativeParams& gen,
                   const EncoderParams& enc, const ElboCache& cache,
                   ModelGrads& grads) {
  if (!cache.basis) {
    fail(ErrorCode::invalid_argument,
         "elbo_backward: cache does not hold a matching elbo() forward pass");
  }
  doc_backward(cfg, *cache.basis, gen, enc, cache, grads);
  basis_backward(*cache.basis, gen, grads);
}

TrainResult train(const Corpus& corpus, const TrainConfig& cfg) {
  validate(cfg);
  if (corpus.docs.empty()) fail(ErrorCode::data, "train: empty corpus");

  TrainResult result;
  result.model = init_model(corpus.vocab, cfg);
  Model& model = result.model;

  Rng rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);  // separate stream from init

  ParamSet params = param_refs(model);
  ModelGrads grads;
  grads.init_like(model);
  ParamSet gset = grad_refs(grads);

  AdamState adam;
  AdamConfig adam_cfg;
  adam_cfg.lr = cfg.learning_rate;
  adam.init(adam_cfg, params);

  const std::int64_t n_docs = static_cast<std::int64_t>(corpus.docs.size());
  std::vector<std::int64_t> order(n_docs);
  std::iota(order.begin(), order.end(), 0);

  const int hidden = cfg.hidden_dim;
  const bool use_dropout = cfg.dropout > 0.0;
  ElboCache cache;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss_sum = 0.0;
    std::int64_t epoch_docs = 0;
    int batch_index = 0;

    for (std::int64_t start = 0; start < n_docs; start += cfg.batch_size) {
      const std::int64_t end = std::min<std::int64_t>(start + cfg.batch_size, n_docs);
      const int m = static_cast<int>(end - start);
      ++batch_index;

      TopicBasis basis = compute_topic_basis(model.gen, cfg.variant);

      // Per-document randomness is drawn up front, in document order.
      std::vector<double> eps(static_cast<std::size_t>(m) * cfg.latent_dim);
      rng.fill_normal(eps.data(), eps.size());
      std::vector<double> drop;
      if (use_dropout) {
        drop.resize(static_cast<std::size_t>(m) * hidden);
        for (double& u : drop) u = rng.uniform();
      }

      grads.zero();
      double loss_sum = 0.0, recon_sum = 0.0, reg_sum = 0.0;
      bool finite = true;
      try {
        for (int i = 0; i < m; ++i) {
          const BowDocument& doc = corpus.docs[order[start + i]];
          std::span<const double> doc_eps(eps.data() + static_cast<std::size_t>(i) * cfg.latent_dim,
                                          cfg.latent_dim);
          std::span<const double> doc_drop;
          if (use_dropout) {
            doc_drop = std::span<const double>(
                drop.data() + static_cast<std::size_t>(i) * hidden, hidden);
          }
          ElboResult r = elbo_forward(cfg, basis, model.gen, model.enc, doc,
                                      doc_eps, doc_drop, cache);
          loss_sum += r.loss;
          recon_sum += r.recon_nll;
          reg_sum += r.reg;
          doc_backward(cfg, basis, model.gen, model.enc, cache, grads);
        }
        basis_backward(basis, model.gen, grads);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::numeric) throw;
        finite = false;
      }

      if (finite) {
        const double inv_m = 1.0 / m;
        for (const auto& g : gset) {
          for (double& x : *g.data) x *= inv_m;
        }
        try {
          adam_step(adam, params, gset);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::numeric) throw;
          finite = false;
        }
      }

      if (!finite) {
        // The step was not applied: the model keeps the last parameters that
        // produced a finite loss.
        result.diverged = true;
        result.diverged_epoch = epoch;
        result.diverged_batch = batch_index;
        return result;
      }

      TraceRow row;
      row.epoch = epoch;
      row.batch = batch_index;
      row.loss = loss_sum / m;
      row.recon = recon_sum / m;
      row.reg_term = cfg.gamma * reg_sum / m;
      result.trace.push_back(row);
      epoch_loss_sum += loss_sum;
      epoch_docs += m;
    }
    result.epoch_mean_loss.push_back(epoch_loss_sum / static_cast<double>(epoch_docs));
  }
  return result;
}

ElboResult mean_full_loss(const Model& model, const Corpus& corpus) {
  if (corpus.docs.empty()) fail(ErrorCode::data, "mean_full_loss: empty corpus");
  TrainConfig cfg = model.cfg;
  cfg.dropout = 0.0;
  TopicBasis basis = compute_topic_basis(model.gen, cfg.variant);
  std::vector<double> eps(cfg.latent_dim, 0.0);
  ElboCache cache;
  ElboResult total;
  for (const auto& doc : corpus.docs) {
    ElboResult r = elbo_forward(cfg, basis, model.gen, model.enc, doc, eps, {}, cache);
    total.loss += r.loss;
    total.recon_nll += r.recon_nll;
    total.reg += r.reg;
  }
  const double inv_n = 1.0 / static_cast<double>(corpus.docs.size());
  total.loss *= inv_n;
  total.recon_nll *= inv_n;
  total.reg *= inv_n;
  return total;
}

DocPosterior infer_theta(const Model& model, const BowDocument& doc) {
  if (doc.empty()) fail(ErrorCode::invalid_argument, "infer_theta: empty document");
  DocPosterior post;
  post.latent = encode(model.enc, doc);

  const int topics = model.cfg.topics;
  std::vector<double> preact(topics, 0.0);
  for (int a = 0; a < model.cfg.latent_dim; ++a) {
    axpy(post.latent.mean[a], model.gen.projection.row(a), preact.data(), topics);
  }
  post.theta = sparsemax(preact);
  return post;
}

std::vector<std::pair<int, double>> top_words(const Model& model, int k, int n,
                                              bool* clamped) {
  if (k < 0 || k >= model.cfg.topics) {
    fail(ErrorCode::invalid_argument, "top_words: topic index out of range");
  }
  if (n < 1) fail(ErrorCode::invalid_argument, "top_words: n must be >= 1");
  const int vocab = model.vocab.size();
  if (clamped != nullptr) *clamped = n > vocab;
  n = std::min(n, vocab);

  TopicBasis basis = compute_topic_basis(model.gen, model.cfg.variant);
  const double* row = model.cfg.variant == Variant::nsmtm
                          ? basis.phi[k].values.data()
                          : basis.rho.row(k);

  std::vector<int> idx(vocab);
  std::iota(idx.begin(), idx.end(), 0);
  std::partial_sort(idx.begin(), idx.begin() + n, idx.end(), [&](int a, int b) {
    if (row[a] != row[b]) return row[a] > row[b];
    return a < b;
  });

  std::vector<std::pair<int, double>> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) out.emplace_back(idx[i], row[idx[i]]);
  return out;
}

}  // namespace sparsetopic
