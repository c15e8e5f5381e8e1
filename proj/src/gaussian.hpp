// Copyright 2026 The sparsetopic Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Diagonal Gaussians: reparameterized sampling and the two variational
// regularizers. The relaxed-Wasserstein divergence with quadratic Bregman
// cost has a closed form for Gaussians; the Monte-Carlo routine estimates
// the same quantity through the optimal coupling and exists to verify the
// closed form independently.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace sparsetopic {

struct DiagGaussian {
  std::vector<double> mean;
  std::vector<double> stddev;  // strictly positive

  int dim() const { return static_cast<int>(mean.size()); }
};

// mu + sigma .* eps, deterministic given eps.
std::vector<double> sample(const DiagGaussian& g, std::span<const double> eps);

// ||mu_p - mu_q||^2 + sum_i (sigma_p_i - sigma_q_i)^2.
// Symmetric, nonnegative, zero iff p == q; stays finite as either stddev
// approaches zero.
double rw_divergence(const DiagGaussian& p, const DiagGaussian& q);

// Empirical mean of ||x - y||^2 under the optimal coupling
// y = mu_q + (sigma_q / sigma_p) .* (x - mu_p), x ~ p.
double rw_monte_carlo_oracle(const DiagGaussian& p, const DiagGaussian& q,
                             std::int64_t n, std::uint64_t seed);

// KL(q || p) for diagonal Gaussians. Blows up as sigma_q -> 0 with sigma_p
// fixed, which is the instability the RW regularizer avoids.
double kl_divergence(const DiagGaussian& q, const DiagGaussian& p);

}  // namespace sparsetopic
