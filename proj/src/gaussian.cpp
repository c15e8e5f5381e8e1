// Copyright 2026 The sparsetopic Authors.
// SPDX-License-Identifier: Apache-2.0

#include "gaussian.hpp"

#include <cmath>

#include "error.hpp"
#include "rng.hpp"

namespace sparsetopic {

namespace {

void require_same_dim(const DiagGaussian& a, const DiagGaussian& b,
                      const char* who) {
  if (a.dim() != b.dim() || a.mean.size() != a.stddev.size() ||
      b.mean.size() != b.stddev.size()) {
    fail(ErrorCode::invalid_argument, std::string(who) + ": dimension mismatch");
  }
}

}  // namespace

std::vector<double> sample(const DiagGaussian& g, std::span<const double> eps) {
  if (eps.size() != g.mean.size() || g.mean.size() != g.stddev.size()) {
    fail(ErrorCode::invalid_argument, "sample: dimension mismatch");
  }
  std::vector<double> x(g.dim());
  for (int i = 0; i < g.dim(); ++i) x[i] = g.mean[i] + g.stddev[i] * eps[i];
  return x;
}

double rw_divergence(const DiagGaussian& p, const DiagGaussian& q) {
  require_same_dim(p, q, "rw_divergence");
  double w = 0.0;
  for (int i = 0; i < p.dim(); ++i) {
    const double dm = p.mean[i] - q.mean[i];
    const double ds = p.stddev[i] - q.stddev[i];
    w += dm * dm + ds * ds;
  }
  return w;
}

double rw_monte_carlo_oracle(const DiagGaussian& p, const DiagGaussian& q,
                             std::int64_t n, std::uint64_t seed) {
  require_same_dim(p, q, "rw_monte_carlo_oracle");
  if (n < 1) fail(ErrorCode::invalid_argument, "rw_monte_carlo_oracle: n < 1");
  Rng rng(seed);
  const int d = p.dim();
  double acc = 0.0;
  for (std::int64_t s = 0; s < n; ++s) {
    double cost = 0.0;
    for (int i = 0; i < d; ++i) {
      const double eps = rng.normal();
      const double x = p.mean[i] + p.stddev[i] * eps;
      const double y = q.mean[i] + (q.stddev[i] / p.stddev[i]) * (x - p.mean[i]);
      const double diff = x - y;
      cost += diff * diff;
    }
    acc += cost;
  }
  return acc / static_cast<double>(n);
}

double kl_divergence(const DiagGaussian& q, const DiagGaussian& p) {
  require_same_dim(q, p, "kl_divergence");
  double kl = 0.0;
  for (int i = 0; i < q.dim(); ++i) {
    const double sq = q.stddev[i];
    const double sp = p.stddev[i];
    const double dm = q.mean[i] - p.mean[i];
    kl += std::log(sp / sq) + (sq * sq + dm * dm) / (2.0 * sp * sp) - 0.5;
  }
  return kl;
}

}  // namespace sparsetopic
