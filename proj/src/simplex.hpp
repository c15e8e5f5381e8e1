// Copyright 2026 The sparsetopic Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Maps onto the probability simplex: sparsemax (Euclidean projection, exact
// zeros), softmax, the sparsemax Jacobian-vector product, and a brute-force
// projection oracle used by the tests.

#pragma once

#include <span>
#include <vector>

namespace sparsetopic {

// Result of sparsemax. Entries below the threshold are stored as exact 0.0;
// downstream sparsity metrics count exact zeros, so no epsilon smudging.
struct SparsePoint {
  std::vector<double> values;  // on the simplex, sums to 1
  std::vector<int> support;    // ascending indices of strictly positive entries
  double tau = 0.0;            // subtracted threshold
  bool boundary_tie = false;   // an excluded coordinate sits (numerically) at tau

  int dim() const { return static_cast<int>(values.size()); }
};

// Euclidean projection of x onto the probability simplex, computed by the
// descending-sort threshold rule. Throws ErrorCode::numeric on non-finite
// input.
SparsePoint sparsemax(std::span<const double> x);

struct JvpResult {
  std::vector<double> value;
  // True when the generating input had a coordinate at the support boundary;
  // the value is then the one-sided derivative for the computed support.
  bool degenerate = false;
};

// Jacobian-vector product of sparsemax at the point that produced p:
// Jv = s .* v - s * (sum of v over the support) / |support|.
JvpResult sparsemax_jvp(const SparsePoint& p, std::span<const double> v);
JvpResult sparsemax_jvp(std::span<const double> x, std::span<const double> v);

// Max-shifted softmax; strictly positive, sums to 1.
std::vector<double> softmax(std::span<const double> x);

// log(softmax(x)), stable for the reconstruction term.
std::vector<double> log_softmax(std::span<const double> x);

// Test oracle: solves min ||p - x||^2 over the simplex by enumerating all
// 2^d - 1 candidate supports and keeping the feasible minimizer. d <= 20.
std::vector<double> project_simplex_oracle(std::span<const double> x);

}  // namespace sparsetopic
