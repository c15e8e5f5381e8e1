// Copyright 2026 The sparsetopic Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <vector>

namespace sparsetopic {

// Dense row-major matrix. Deliberately minimal: the kernels in this project
// are explicit loops, so all we need is owned storage with row access.
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}

  double* row(int r) { return a.data() + static_cast<std::size_t>(r) * cols; }
  const double* row(int r) const {
    return a.data() + static_cast<std::size_t>(r) * cols;
  }
  double& at(int r, int c) { return a[static_cast<std::size_t>(r) * cols + c]; }
  double at(int r, int c) const {
    return a[static_cast<std::size_t>(r) * cols + c];
  }
  std::size_t size() const { return a.size(); }
  void zero() { std::fill(a.begin(), a.end(), 0.0); }
};

inline double dot(const double* x, const double* y, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

// y += alpha * x
inline void axpy(double alpha, const double* x, double* y, int n) {
  for (int i = 0; i < n; ++i) y[i] += alpha * x[i];
}

inline bool all_finite(const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(x[i])) return false;
  }
  return true;
}

inline bool all_finite(const std::vector<double>& x) {
  return all_finite(x.data(), x.size());
}

}  // namespace sparsetopic
