// Copyright 2026 The sparsetopic Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Minimal feedforward machinery: dense layers, the two-layer ReLU encoder
// that maps a bag-of-words vector to a diagonal Gaussian, explicit
// backpropagation with cached activations, Adam, and a central-difference
// gradient checker. No autodiff graph: every gradient here is written out
// by hand and verified against finite differences.

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "gaussian.hpp"
#include "mat.hpp"
#include "rng.hpp"

namespace sparsetopic {

struct DenseLayer {
  Mat w;                  // out x in
  std::vector<double> b;  // out

  int out_dim() const { return w.rows; }
  int in_dim() const { return w.cols; }
};

// lambda1 = ReLU(W1 w + b1); lambda2 = ReLU(W2 lambda1 + b2);
// mu = W3 lambda2 + b3; log sigma = W4 lambda2 + b4.
struct EncoderParams {
  DenseLayer layer1;       // hidden x |V|
  DenseLayer layer2;       // hidden x hidden
  DenseLayer mean_head;    // d x hidden
  DenseLayer logstd_head;  // d x hidden

  int vocab_dim() const { return layer1.in_dim(); }
  int hidden_dim() const { return layer1.out_dim(); }
  int latent_dim() const { return mean_head.out_dim(); }
};

// Sparse document vector (term frequencies, counts / N_j).
struct SparseVec {
  std::vector<int> idx;
  std::vector<double> val;
};

SparseVec normalize_bow(const BowDocument& doc);

struct EncoderCache {
  SparseVec x;
  std::vector<double> a1, h1;    // layer1 preactivation / ReLU output
  std::vector<double> a2, h2;    // layer2 preactivation / ReLU output
  std::vector<double> h2d;       // h2 after (inverted) dropout
  std::vector<double> drop_mask; // empty in eval mode
  std::vector<double> mu, logstd;
};

struct EncoderGrads {
  Mat dw1, dw2, dw3, dw4;
  std::vector<double> db1, db2, db3, db4;

  void init_like(const EncoderParams& p);
  void zero();
};

// Forward pass. When dropout_rate > 0 and dropout_uniforms (one uniform draw
// per hidden unit, supplied by the caller so the draw order stays fixed) is
// nonempty, an inverted-dropout mask is applied to lambda2; otherwise dropout
// is the identity (eval mode). Throws ErrorCode::numeric naming the offending
// layer when an activation goes non-finite.
DiagGaussian encode_forward(const EncoderParams& params, const SparseVec& x,
                            double dropout_rate,
                            std::span<const double> dropout_uniforms,
                            EncoderCache& cache);

// Spec-facing eval-mode encode: pure, no dropout, no sampling.
DiagGaussian encode(const EncoderParams& params, const BowDocument& doc);

// Exact gradients of the forward map w.r.t. every layer, accumulated (+=)
// into grads. upstream_logstd is the gradient w.r.t. log(sigma).
void encode_backward(const EncoderParams& params, const EncoderCache& cache,
                     std::span<const double> upstream_mu,
                     std::span<const double> upstream_logstd,
                     EncoderGrads& grads);

// Glorot-uniform weights, zero biases; the logstd head bias starts at -1 so
// the initial sigma ~= 0.37 keeps early sparsemax inputs unsaturated.
EncoderParams init_encoder(int vocab, int hidden, int latent, Rng& rng);

void glorot_init(Mat& w, Rng& rng);

// Flat named view over parameter arrays; the order is the accumulation,
// optimizer, and checkpoint order.
struct ParamRef {
  std::string name;
  std::vector<double>* data;
};
using ParamSet = std::vector<ParamRef>;

ParamSet param_refs(EncoderParams& p, const std::string& prefix);
ParamSet param_refs(EncoderGrads& g, const std::string& prefix);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  AdamConfig cfg;
  std::int64_t step = 0;
  std::vector<std::vector<double>> m, v;

  void init(const AdamConfig& c, const ParamSet& params);
};

// Standard bias-corrected Adam update. Throws ErrorCode::numeric naming the
// parameter when a gradient is non-finite.
void adam_step(AdamState& state, const ParamSet& params, const ParamSet& grads);

// Central-difference check of `analytic` against f. Perturbs each coordinate
// in place by +-h (restoring it afterwards) and returns the worst relative
// error over coordinates. Coordinates where both gradients are below 1e-6 in
// magnitude are skipped: at that scale the difference quotient is roundoff.
double check_gradients(const std::function<double()>& f, const ParamSet& params,
                       const ParamSet& analytic, double h);

}  // namespace sparsetopic
