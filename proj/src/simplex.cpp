// Copyright 2026 The sparsetopic Authors.
// SPDX-License-Identifier: Apache-2.0

#include "simplex.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

#include "error.hpp"

namespace sparsetopic {

namespace {

void require_finite(std::span<const double> x, const char* who) {
  for (double v : x) {
    if (!std::isfinite(v)) {
      fail(ErrorCode::numeric, std::string(who) + ": non-finite input coordinate");
    }
  }
  if (x.empty()) {
    fail(ErrorCode::invalid_argument, std::string(who) + ": empty input");
  }
}

}  // namespace

SparsePoint sparsemax(std::span<const double> x) {
  require_finite(x, "sparsemax");
  const int d = static_cast<int>(x.size());

  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());

  // T(x) = max k with 1 + k*x_(k) > sum_{j<=k} x_(j), strict inequality.
  int support_size = 1;
  double cum = sorted[0];
  double cum_at_support = sorted[0];
  for (int k = 2; k <= d; ++k) {
    cum += sorted[k - 1];
    if (1.0 + k * sorted[k - 1] > cum) {
      support_size = k;
      cum_at_support = cum;
    }
  }
  const double tau = (cum_at_support - 1.0) / support_size;

  SparsePoint p;
  p.tau = tau;
  p.values.resize(d);
  p.support.reserve(support_size);
  double scale = 1.0;
  for (double v : x) scale = std::max(scale, std::abs(v));
  const double tie_tol = 1e-9 * scale;
  double max_excluded = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < d; ++i) {
    const double v = x[i] - tau;
    if (v > 0.0) {
      p.values[i] = v;
      p.support.push_back(i);
    } else {
      p.values[i] = 0.0;
      max_excluded = std::max(max_excluded, x[i]);
    }
  }
  p.boundary_tie = p.support.size() < static_cast<std::size_t>(d) &&
                   max_excluded >= tau - tie_tol;
  return p;
}

JvpResult sparsemax_jvp(const SparsePoint& p, std::span<const double> v) {
  if (v.size() != p.values.size()) {
    fail(ErrorCode::invalid_argument, "sparsemax_jvp: dimension mismatch");
  }
  JvpResult r;
  r.degenerate = p.boundary_tie;
  r.value.assign(v.size(), 0.0);
  double mean = 0.0;
  for (int i : p.support) mean += v[i];
  mean /= static_cast<double>(p.support.size());
  for (int i : p.support) r.value[i] = v[i] - mean;
  return r;
}

JvpResult sparsemax_jvp(std::span<const double> x, std::span<const double> v) {
  return sparsemax_jvp(sparsemax(x), v);
}

std::vector<double> softmax(std::span<const double> x) {
  require_finite(x, "softmax");
  std::vector<double> out(x.size());
  const double m = *std::max_element(x.begin(), x.end());
  double z = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = std::exp(x[i] - m);
    z += out[i];
  }
  for (double& o : out) o /= z;
  return out;
}

std::vector<double> log_softmax(std::span<const double> x) {
  require_finite(x, "log_softmax");
  std::vector<double> out(x.size());
  const double m = *std::max_element(x.begin(), x.end());
  double z = 0.0;
  for (double v : x) z += std::exp(v - m);
  const double lse = m + std::log(z);
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - lse;
  return out;
}

std::vector<double> project_simplex_oracle(std::span<const double> x) {
  require_finite(x, "project_simplex_oracle");
  const int d = static_cast<int>(x.size());
  if (d > 20) {
    fail(ErrorCode::invalid_argument,
         "project_simplex_oracle: dimension > 20 (exhaustive enumeration)");
  }

  double best_obj = std::numeric_limits<double>::infinity();
  std::uint32_t best_mask = 0;
  double best_tau = 0.0;
  double sumsq_all = 0.0;
  for (double v : x) sumsq_all += v * v;

  const std::uint32_t n_masks = (1u << d);
  for (std::uint32_t mask = 1; mask < n_masks; ++mask) {
    int k = 0;
    double sum = 0.0, sumsq = 0.0;
    for (std::uint32_t bits = mask; bits != 0; bits &= bits - 1) {
      const int i = std::countr_zero(bits);
      ++k;
      sum += x[i];
      sumsq += x[i] * x[i];
    }
    // Equality-constrained subproblem on this support: p_i = x_i - tau.
    const double tau = (sum - 1.0) / k;
    bool feasible = true;
    for (std::uint32_t bits = mask; bits != 0; bits &= bits - 1) {
      if (x[std::countr_zero(bits)] - tau < 0.0) {
        feasible = false;
        break;
      }
    }
    if (!feasible) continue;
    const double obj = k * tau * tau + (sumsq_all - sumsq);
    if (obj < best_obj) {
      best_obj = obj;
      best_mask = mask;
      best_tau = tau;
    }
  }

  std::vector<double> p(d, 0.0);
  for (std::uint32_t bits = best_mask; bits != 0; bits &= bits - 1) {
    const int i = std::countr_zero(bits);
    p[i] = x[i] - best_tau;
  }
  return p;
}

}  // namespace sparsetopic
