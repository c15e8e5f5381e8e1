// Copyright 2026 The sparsetopic Authors.
// SPDX-License-Identifier: Apache-2.0

#include "net.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace sparsetopic {

namespace {

void check_layer_finite(const std::vector<double>& v, const char* layer) {
  if (!all_finite(v)) {
    fail(ErrorCode::numeric,
         std::string("encoder: non-finite activation in ") + layer);
  }
}

// y = W x + b for sparse x.
void dense_sparse(const DenseLayer& layer, const SparseVec& x,
                  std::vector<double>& y) {
  y.assign(layer.b.begin(), layer.b.end());
  const int out = layer.out_dim();
  for (std::size_t k = 0; k < x.idx.size(); ++k) {
    const int col = x.idx[k];
    const double xv = x.val[k];
    const double* w = layer.w.a.data() + col;
    const int stride = layer.in_dim();
    for (int r = 0; r < out; ++r) y[r] += w[static_cast<std::size_t>(r) * stride] * xv;
  }
}

// y = W x + b for dense x.
void dense(const DenseLayer& layer, const std::vector<double>& x,
           std::vector<double>& y) {
  const int out = layer.out_dim();
  const int in = layer.in_dim();
  y.resize(out);
  for (int r = 0; r < out; ++r) {
    y[r] = layer.b[r] + dot(layer.w.row(r), x.data(), in);
  }
}

void relu(const std::vector<double>& a, std::vector<double>& h) {
  h.resize(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) h[i] = a[i] > 0.0 ? a[i] : 0.0;
}

}  // namespace

SparseVec normalize_bow(const BowDocument& doc) {
  if (doc.empty()) fail(ErrorCode::invalid_argument, "normalize_bow: empty document");
  SparseVec x;
  x.idx.reserve(doc.counts.size());
  x.val.reserve(doc.counts.size());
  const double inv_len = 1.0 / static_cast<double>(doc.length);
  for (const auto& [id, c] : doc.counts) {
    x.idx.push_back(id);
    x.val.push_back(c * inv_len);
  }
  return x;
}

DiagGaussian encode_forward(const EncoderParams& params, const SparseVec& x,
                            double dropout_rate,
                            std::span<const double> dropout_uniforms,
                            EncoderCache& cache) {
  cache.x = x;
  dense_sparse(params.layer1, x, cache.a1);
  check_layer_finite(cache.a1, "layer1");
  relu(cache.a1, cache.h1);

  dense(params.layer2, cache.h1, cache.a2);
  check_layer_finite(cache.a2, "layer2");
  relu(cache.a2, cache.h2);

  if (dropout_rate > 0.0 && !dropout_uniforms.empty()) {
    if (dropout_uniforms.size() != cache.h2.size()) {
      fail(ErrorCode::invalid_argument,
           "encode_forward: dropout_uniforms size mismatch");
    }
    const double keep = 1.0 - dropout_rate;
    cache.drop_mask.resize(cache.h2.size());
    cache.h2d.resize(cache.h2.size());
    for (std::size_t i = 0; i < cache.h2.size(); ++i) {
      cache.drop_mask[i] = dropout_uniforms[i] < keep ? 1.0 / keep : 0.0;
      cache.h2d[i] = cache.h2[i] * cache.drop_mask[i];
    }
  } else {
    cache.drop_mask.clear();
    cache.h2d = cache.h2;
  }

  dense(params.mean_head, cache.h2d, cache.mu);
  check_layer_finite(cache.mu, "mean_head");
  dense(params.logstd_head, cache.h2d, cache.logstd);
  check_layer_finite(cache.logstd, "logstd_head");

  DiagGaussian g;
  g.mean = cache.mu;
  g.stddev.resize(cache.logstd.size());
  for (std::size_t i = 0; i < cache.logstd.size(); ++i) {
    g.stddev[i] = std::exp(cache.logstd[i]);
  }
  check_layer_finite(g.stddev, "logstd_head (exp)");
  return g;
}

DiagGaussian encode(const EncoderParams& params, const BowDocument& doc) {
  EncoderCache cache;
  return encode_forward(params, normalize_bow(doc), 0.0, {}, cache);
}

void EncoderGrads::init_like(const EncoderParams& p) {
  dw1 = Mat(p.layer1.w.rows, p.layer1.w.cols);
  dw2 = Mat(p.layer2.w.rows, p.layer2.w.cols);
  dw3 = Mat(p.mean_head.w.rows, p.mean_head.w.cols);
  dw4 = Mat(p.logstd_head.w.rows, p.logstd_head.w.cols);
  db1.assign(p.layer1.b.size(), 0.0);
  db2.assign(p.layer2.b.size(), 0.0);
  db3.assign(p.mean_head.b.size(), 0.0);
  db4.assign(p.logstd_head.b.size(), 0.0);
}

void EncoderGrads::zero() {
  dw1.zero();
  dw2.zero();
  dw3.zero();
  dw4.zero();
  std::fill(db1.begin(), db1.end(), 0.0);
  std::fill(db2.begin(), db2.end(), 0.0);
  std::fill(db3.begin(), db3.end(), 0.0);
  std::fill(db4.begin(), db4.end(), 0.0);
}

void encode_backward(const EncoderParams& params, const EncoderCache& cache,
                     std::span<const double> upstream_mu,
                     std::span<const double> upstream_logstd,
                     EncoderGrads& grads) {
  if (cache.h2d.empty()) {
    fail(ErrorCode::invalid_argument,
         "encode_backward: no cached forward pass");
  }
  const int hidden = params.hidden_dim();
  const int latent = params.latent_dim();

  // Heads.
  std::vector<double> dh2d(hidden, 0.0);
  for (int r = 0; r < latent; ++r) {
    const double gmu = upstream_mu[r];
    const double gls = upstream_logstd[r];
    axpy(gmu, cache.h2d.data(), grads.dw3.row(r), hidden);
    axpy(gls, cache.h2d.data(), grads.dw4.row(r), hidden);
    grads.db3[r] += gmu;
    grads.db4[r] += gls;
    axpy(gmu, params.mean_head.w.row(r), dh2d.data(), hidden);
    axpy(gls, params.logstd_head.w.row(r), dh2d.data(), hidden);
  }

  // Dropout and layer2 ReLU.
  std::vector<double> da2(hidden);
  if (!cache.drop_mask.empty()) {
    for (int i = 0; i < hidden; ++i) dh2d[i] *= cache.drop_mask[i];
  }
  for (int i = 0; i < hidden; ++i) {
    da2[i] = cache.a2[i] > 0.0 ? dh2d[i] : 0.0;
  }

  // Layer2.
  std::vector<double> dh1(hidden, 0.0);
  for (int r = 0; r < hidden; ++r) {
    const double g = da2[r];
    if (g == 0.0) continue;
    axpy(g, cache.h1.data(), grads.dw2.row(r), hidden);
    grads.db2[r] += g;
    axpy(g, params.layer2.w.row(r), dh1.data(), hidden);
  }

  // Layer1 ReLU; the input is sparse, so only touched columns get gradient.
  for (int r = 0; r < hidden; ++r) {
    const double g = cache.a1[r] > 0.0 ? dh1[r] : 0.0;
    if (g == 0.0) continue;
    grads.db1[r] += g;
    double* wrow = grads.dw1.row(r);
    for (std::size_t k = 0; k < cache.x.idx.size(); ++k) {
      wrow[cache.x.idx[k]] += g * cache.x.val[k];
    }
  }
}

void glorot_init(Mat& w, Rng& rng) {
  const double a = std::sqrt(6.0 / (w.rows + w.cols));
  for (double& x : w.a) x = rng.uniform(-a, a);
}

EncoderParams init_encoder(int vocab, int hidden, int latent, Rng& rng) {
  if (vocab < 1 || hidden < 1 || latent < 1) {
    fail(ErrorCode::invalid_argument, "init_encoder: bad dimensions");
  }
  EncoderParams p;
  p.layer1.w = Mat(hidden, vocab);
  p.layer1.b.assign(hidden, 0.0);
  p.layer2.w = Mat(hidden, hidden);
  p.layer2.b.assign(hidden, 0.0);
  p.mean_head.w = Mat(latent, hidden);
  p.mean_head.b.assign(latent, 0.0);
  p.logstd_head.w = Mat(latent, hidden);
  p.logstd_head.b.assign(latent, -1.0);
  glorot_init(p.layer1.w, rng);
  glorot_init(p.layer2.w, rng);
  glorot_init(p.mean_head.w, rng);
  glorot_init(p.logstd_head.w, rng);
  return p;
}

ParamSet param_refs(EncoderParams& p, const std::string& prefix) {
  return {
      {prefix + ".layer1.w", &p.layer1.w.a},
      {prefix + ".layer1.b", &p.layer1.b},
      {prefix + ".layer2.w", &p.layer2.w.a},
      {prefix + ".layer2.b", &p.layer2.b},
      {prefix + ".mean_head.w", &p.mean_head.w.a},
      {prefix + ".mean_head.b", &p.mean_head.b},
      {prefix + ".logstd_head.w", &p.logstd_head.w.a},
      {prefix + ".logstd_head.b", &p.logstd_head.b},
  };
}

ParamSet param_refs(EncoderGrads& g, const std::string& prefix) {
  return {
      {prefix + ".layer1.w", &g.dw1.a},
      {prefix + ".layer1.b", &g.db1},
      {prefix + ".layer2.w", &g.dw2.a},
      {prefix + ".layer2.b", &g.db2},
      {prefix + ".mean_head.w", &g.dw3.a},
      {prefix + ".mean_head.b", &g.db3},
      {prefix + ".logstd_head.w", &g.dw4.a},
      {prefix + ".logstd_head.b", &g.db4},
  };
}

void AdamState::init(const AdamConfig& c, const ParamSet& params) {
  cfg = c;
  step = 0;
  m.clear();
  v.clear();
  for (const auto& p : params) {
    m.emplace_back(p.data->size(), 0.0);
    v.emplace_back(p.data->size(), 0.0);
  }
}

void adam_step(AdamState& state, const ParamSet& params, const ParamSet& grads) {
  if (params.size() != grads.size() || params.size() != state.m.size()) {
    fail(ErrorCode::invalid_argument, "adam_step: parameter set mismatch");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].data->size() != grads[i].data->size()) {
      fail(ErrorCode::invalid_argument,
           "adam_step: shape mismatch for " + params[i].name);
    }
    if (!all_finite(*grads[i].data)) {
      fail(ErrorCode::numeric,
           "adam_step: non-finite gradient for " + params[i].name);
    }
  }
  ++state.step;
  const double b1 = state.cfg.beta1, b2 = state.cfg.beta2;
  const double corr1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double corr2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    std::vector<double>& p = *params[i].data;
    const std::vector<double>& g = *grads[i].data;
    std::vector<double>& mi = state.m[i];
    std::vector<double>& vi = state.v[i];
    for (std::size_t j = 0; j < p.size(); ++j) {
      mi[j] = b1 * mi[j] + (1.0 - b1) * g[j];
      vi[j] = b2 * vi[j] + (1.0 - b2) * g[j] * g[j];
      const double mhat = mi[j] / corr1;
      const double vhat = vi[j] / corr2;
      p[j] -= state.cfg.lr * mhat / (std::sqrt(vhat) + state.cfg.eps);
    }
  }
}

double check_gradients(const std::function<double()>& f, const ParamSet& params,
                       const ParamSet& analytic, double h) {
  if (h <= 0.0) fail(ErrorCode::invalid_argument, "check_gradients: h must be > 0");
  if (params.size() != analytic.size()) {
    fail(ErrorCode::invalid_argument, "check_gradients: set size mismatch");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    std::vector<double>& p = *params[i].data;
    const std::vector<double>& a = *analytic[i].data;
    for (std::size_t j = 0; j < p.size(); ++j) {
      const double saved = p[j];
      const double hj = h * std::max(1.0, std::abs(saved));
      p[j] = saved + hj;
      const double fp = f();
      p[j] = saved - hj;
      const double fm = f();
      p[j] = saved;
      const double numeric = (fp - fm) / (2.0 * hj);
      const double denom = std::max(std::abs(a[j]), std::abs(numeric));
      if (denom < 1e-6) continue;
      worst = std::max(worst, std::abs(a[j] - numeric) / denom);
    }
  }
  return worst;
}

}  // namespace sparsetopic
