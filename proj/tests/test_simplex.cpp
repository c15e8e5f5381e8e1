// Copyright 2026 The sparsetopic Authors.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "error.hpp"
#include "rng.hpp"
#include "simplex.hpp"

using namespace sparsetopic;

namespace {

std::vector<double> central_diff_direction(const std::vector<double>& x,
                                           const std::vector<double>& v,
                                           double h) {
  std::vector<double> xp(x), xm(x);
  for (std::size_t i = 0; i < x.size(); ++i) {
    xp[i] += h * v[i];
    xm[i] -= h * v[i];
  }
  SparsePoint pp = sparsemax(xp);
  SparsePoint pm = sparsemax(xm);
  std::vector<double> d(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    d[i] = (pp.values[i] - pm.values[i]) / (2.0 * h);
  }
  return d;
}

}  // namespace

TEST_CASE("sparsemax is the identity on simplex points") {
  SparsePoint p = sparsemax(std::vector<double>{0.6, 0.3, 0.1});
  CHECK(p.values[0] == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(p.values[1] == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(p.values[2] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(p.tau == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(p.support == std::vector<int>{0, 1, 2});
}

TEST_CASE("sparsemax of a constant vector is uniform") {
  for (int d : {1, 2, 5, 17}) {
    for (double c : {-3.5, 0.0, 0.25, 1e6}) {
      SparsePoint p = sparsemax(std::vector<double>(d, c));
      for (double v : p.values) CHECK(v == doctest::Approx(1.0 / d).epsilon(1e-9));
      CHECK(static_cast<int>(p.support.size()) == d);
    }
  }
}

TEST_CASE("sparsemax matches the hand-worked thresholds") {
  SparsePoint p = sparsemax(std::vector<double>{1.1, 0.5, 0.05});
  CHECK(p.values[0] == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(p.values[1] == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(p.values[2] == 0.0);
  CHECK(p.tau == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(p.support == std::vector<int>{0, 1});

  SparsePoint q = sparsemax(std::vector<double>{2.0, 0.0});
  CHECK(q.values[0] == doctest::Approx(1.0));
  CHECK(q.values[1] == 0.0);
  CHECK(q.tau == doctest::Approx(1.0));
  CHECK_FALSE(q.boundary_tie);
}

TEST_CASE("sparsemax agrees with the brute-force projection oracle") {
  std::vector<double> oracle = project_simplex_oracle(std::vector<double>{1.1, 0.5, 0.05});
  CHECK(oracle[0] == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(oracle[1] == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(oracle[2] == 0.0);

  std::vector<double> id = project_simplex_oracle(std::vector<double>{0.2, 0.8});
  CHECK(id[0] == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(id[1] == doctest::Approx(0.8).epsilon(1e-12));

  Rng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const int d = 2 + static_cast<int>(rng.below(9));
    std::vector<double> x(d);
    for (double& v : x) v = 2.0 * rng.normal();
    SparsePoint p = sparsemax(x);
    std::vector<double> o = project_simplex_oracle(x);
    for (int i = 0; i < d; ++i) {
      CHECK(std::abs(p.values[i] - o[i]) < 1e-9);
    }
  }
}

TEST_CASE("sparsemax invariants: simplex membership, shift invariance, idempotence") {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 1 + static_cast<int>(rng.below(12));
    std::vector<double> x(d);
    for (double& v : x) v = 3.0 * rng.normal();

    SparsePoint p = sparsemax(x);
    double sum = 0.0;
    for (int i = 0; i < d; ++i) {
      CHECK(p.values[i] >= 0.0);
      sum += p.values[i];
      const bool in_support =
          std::find(p.support.begin(), p.support.end(), i) != p.support.end();
      CHECK(in_support == (p.values[i] > 0.0));
    }
    CHECK(std::abs(sum - 1.0) < 1e-12);
    CHECK(p.support.size() >= 1);

    const double shift = 10.0 * rng.normal();
    std::vector<double> xs(x);
    for (double& v : xs) v += shift;
    SparsePoint ps = sparsemax(xs);
    for (int i = 0; i < d; ++i) {
      CHECK(ps.values[i] == doctest::Approx(p.values[i]).epsilon(1e-8));
    }

    SparsePoint pp = sparsemax(p.values);
    for (int i = 0; i < d; ++i) {
      CHECK(pp.values[i] == doctest::Approx(p.values[i]).epsilon(1e-9));
    }
  }
}

TEST_CASE("sparsemax rejects non-finite input") {
  CHECK_THROWS_AS(sparsemax(std::vector<double>{1.0, std::nan("")}), Error);
  CHECK_THROWS_AS(
      sparsemax(std::vector<double>{std::numeric_limits<double>::infinity()}),
      Error);
}

TEST_CASE("oracle rejects dimensions above 20") {
  CHECK_THROWS_AS(project_simplex_oracle(std::vector<double>(21, 0.0)), Error);
}

TEST_CASE("jvp matches the hand-worked example") {
  JvpResult r = sparsemax_jvp(std::vector<double>{1.1, 0.5, 0.05},
                              std::vector<double>{1.0, 0.0, 0.0});
  CHECK(r.value[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.value[1] == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(r.value[2] == 0.0);
  CHECK_FALSE(r.degenerate);
}

TEST_CASE("jvp of the all-ones direction vanishes") {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 2 + static_cast<int>(rng.below(10));
    std::vector<double> x(d);
    for (double& v : x) v = 2.0 * rng.normal();
    JvpResult r = sparsemax_jvp(x, std::vector<double>(d, 1.0));
    for (double v : r.value) CHECK(std::abs(v) < 1e-12);
  }
}

TEST_CASE("jvp at full support centers the direction") {
  // Inputs already close to uniform keep every coordinate in the support.
  std::vector<double> x{0.26, 0.24, 0.25, 0.25};
  std::vector<double> v{1.0, -2.0, 0.5, 3.0};
  const double mean = (1.0 - 2.0 + 0.5 + 3.0) / 4.0;
  JvpResult r = sparsemax_jvp(x, v);
  for (int i = 0; i < 4; ++i) {
    CHECK(r.value[i] == doctest::Approx(v[i] - mean).epsilon(1e-12));
  }
}

TEST_CASE("jvp agrees with central finite differences off the boundary") {
  Rng rng(1234);
  int done = 0;
  while (done < 60) {
    const int d = 2 + static_cast<int>(rng.below(8));
    std::vector<double> x(d), v(d);
    for (double& a : x) a = 2.0 * rng.normal();
    for (double& a : v) a = rng.normal();
    SparsePoint p = sparsemax(x);
    // Kinks break the difference quotient: require a comfortable margin.
    double margin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < d; ++i) margin = std::min(margin, std::abs(x[i] - p.tau));
    if (margin < 1e-3) continue;
    ++done;

    JvpResult r = sparsemax_jvp(p, v);
    std::vector<double> fd = central_diff_direction(x, v, 1e-6);
    // sparsemax is piecewise linear, so away from kinks the difference
    // quotient is exact up to roundoff. When the derivative is identically
    // zero (single-coordinate support) only roundoff remains, so the
    // comparison switches to an absolute bound.
    double denom = 0.0, diff = 0.0;
    for (int i = 0; i < d; ++i) {
      denom = std::max({denom, std::abs(fd[i]), std::abs(r.value[i])});
      diff = std::max(diff, std::abs(r.value[i] - fd[i]));
    }
    if (denom < 1e-6) {
      CHECK(diff < 1e-7);
    } else {
      CHECK(diff / denom < 1e-4);
    }
  }
}

TEST_CASE("boundary tie sets the degeneracy flag") {
  // tau = 0 and the excluded coordinate sits exactly at 0.
  SparsePoint p = sparsemax(std::vector<double>{1.0, 0.0});
  CHECK(p.values[0] == doctest::Approx(1.0));
  CHECK(p.boundary_tie);
  JvpResult r = sparsemax_jvp(p, std::vector<double>{1.0, 0.0});
  CHECK(r.degenerate);
  // One-sided derivative for the computed support {0}.
  CHECK(r.value[0] == doctest::Approx(0.0));
}

TEST_CASE("softmax basics") {
  std::vector<double> u = softmax(std::vector<double>{0.0, 0.0});
  CHECK(u[0] == doctest::Approx(0.5));
  CHECK(u[1] == doctest::Approx(0.5));

  std::vector<double> r = softmax(std::vector<double>{std::log(1.0), std::log(3.0)});
  CHECK(r[0] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(r[1] == doctest::Approx(0.75).epsilon(1e-12));

  std::vector<double> big = softmax(std::vector<double>{1000.0, 0.0});
  CHECK(std::isfinite(big[0]));
  CHECK(big[0] == doctest::Approx(1.0));
  CHECK(big[1] >= 0.0);
}

TEST_CASE("softmax is positive, normalized, argmax-preserving") {
  Rng rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 2 + static_cast<int>(rng.below(10));
    std::vector<double> x(d);
    for (double& v : x) v = 5.0 * rng.normal();
    std::vector<double> s = softmax(x);
    double sum = 0.0;
    for (double v : s) {
      CHECK(v > 0.0);
      sum += v;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    const auto ax = std::max_element(x.begin(), x.end()) - x.begin();
    const auto as = std::max_element(s.begin(), s.end()) - s.begin();
    CHECK(ax == as);
  }
}

TEST_CASE("log_softmax matches log of softmax") {
  std::vector<double> x{0.3, -1.2, 2.0, 0.0};
  std::vector<double> s = softmax(x);
  std::vector<double> ls = log_softmax(x);
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(ls[i] == doctest::Approx(std::log(s[i])).epsilon(1e-12));
  }
}
