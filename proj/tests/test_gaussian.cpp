// Copyright 2026 The sparsetopic Authors.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "error.hpp"
#include "gaussian.hpp"
#include "rng.hpp"

using namespace sparsetopic;

namespace {

DiagGaussian make(std::vector<double> mu, std::vector<double> sigma) {
  return DiagGaussian{std::move(mu), std::move(sigma)};
}

// Trapezoid quadrature of KL(q || p) for 1-D Gaussians; independent of the
// closed form it checks.
double kl_quadrature_1d(double mq, double sq, double mp, double sp) {
  auto logpdf = [](double x, double m, double s) {
    const double z = (x - m) / s;
    return -0.5 * z * z - std::log(s) - 0.91893853320467274178;  // log sqrt(2 pi)
  };
  const double lo = mq - 12.0 * sq, hi = mq + 12.0 * sq;
  const int n = 200000;
  const double h = (hi - lo) / n;
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double x = lo + i * h;
    const double lq = logpdf(x, mq, sq);
    const double f = std::exp(lq) * (lq - logpdf(x, mp, sp));
    acc += (i == 0 || i == n) ? 0.5 * f : f;
  }
  return acc * h;
}

}  // namespace

TEST_CASE("reparameterized sample identities") {
  DiagGaussian std_normal = make({0.0, 0.0, 0.0}, {1.0, 1.0, 1.0});
  std::vector<double> eps{0.3, -1.2, 2.0};
  CHECK(sample(std_normal, eps) == eps);

  DiagGaussian g = make({1.0, 2.0}, {0.5, 2.0});
  std::vector<double> zero{0.0, 0.0};
  CHECK(sample(g, zero) == g.mean);

  std::vector<double> x = sample(g, std::vector<double>{2.0, -1.0});
  CHECK(x[0] == doctest::Approx(2.0));
  CHECK(x[1] == doctest::Approx(0.0));

  CHECK_THROWS_AS(sample(g, std::vector<double>{1.0}), Error);
}

TEST_CASE("rw divergence closed form on hand-worked cases") {
  DiagGaussian p = make({0.0}, {1.0});
  CHECK(rw_divergence(p, p) == 0.0);

  DiagGaussian q = make({1.0}, {1.0});
  CHECK(rw_divergence(p, q) == doctest::Approx(1.0));

  DiagGaussian a = make({0.0, 0.0}, {1.0, 1.0});
  DiagGaussian b = make({1.0, 2.0}, {2.0, 3.0});
  CHECK(rw_divergence(a, b) == doctest::Approx(10.0));

  CHECK_THROWS_AS(rw_divergence(a, p), Error);
}

TEST_CASE("rw divergence is symmetric, nonnegative, zero only at equality") {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 1 + static_cast<int>(rng.below(6));
    DiagGaussian p, q;
    for (int i = 0; i < d; ++i) {
      p.mean.push_back(rng.normal());
      q.mean.push_back(rng.normal());
      p.stddev.push_back(std::exp(rng.normal()));
      q.stddev.push_back(std::exp(rng.normal()));
    }
    const double w = rw_divergence(p, q);
    CHECK(w >= 0.0);
    CHECK(w == doctest::Approx(rw_divergence(q, p)));
    CHECK(rw_divergence(p, p) == 0.0);
  }
}

TEST_CASE("monte carlo oracle reproduces the closed form") {
  DiagGaussian p = make({0.0}, {1.0});
  DiagGaussian q = make({1.0}, {1.0});
  CHECK(rw_monte_carlo_oracle(p, p, 1000, 42) == 0.0);

  const double est1 = rw_monte_carlo_oracle(p, q, 200000, 42);
  CHECK(std::abs(est1 - 1.0) / 1.0 < 0.02);

  DiagGaussian a = make({0.0, 0.0}, {1.0, 1.0});
  DiagGaussian b = make({1.0, 2.0}, {2.0, 3.0});
  const double est2 = rw_monte_carlo_oracle(a, b, 200000, 42);
  CHECK(std::abs(est2 - 10.0) / 10.0 < 0.02);

  // Determinism contract.
  CHECK(rw_monte_carlo_oracle(a, b, 5000, 7) ==
        rw_monte_carlo_oracle(a, b, 5000, 7));
}

TEST_CASE("monte carlo error shrinks consistently with 1/sqrt(n)") {
  DiagGaussian p = make({0.0, 1.0}, {1.0, 0.5});
  DiagGaussian q = make({0.5, -1.0}, {2.0, 1.5});
  const double exact = rw_divergence(p, q);
  double err_small = 0.0, err_large = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    err_small += std::abs(rw_monte_carlo_oracle(p, q, 100, seed) - exact);
    err_large += std::abs(rw_monte_carlo_oracle(p, q, 1000000, seed) - exact);
  }
  // 10000x more samples should buy roughly 100x accuracy; allow a wide band.
  CHECK(err_large < err_small / 10.0);
}

TEST_CASE("kl divergence closed form against quadrature") {
  DiagGaussian p = make({0.0}, {1.0});
  CHECK(kl_divergence(p, p) == 0.0);

  DiagGaussian q = make({1.0}, {1.0});
  CHECK(kl_divergence(q, p) == doctest::Approx(0.5));

  DiagGaussian wide = make({0.0}, {2.0});
  const double expected = 0.5 * (4.0 - 1.0 - std::log(4.0));
  CHECK(kl_divergence(wide, p) == doctest::Approx(expected).epsilon(1e-9));
  CHECK(kl_divergence(wide, p) ==
        doctest::Approx(kl_quadrature_1d(0.0, 2.0, 0.0, 1.0)).epsilon(1e-5));
  CHECK(kl_divergence(q, p) ==
        doctest::Approx(kl_quadrature_1d(1.0, 1.0, 0.0, 1.0)).epsilon(1e-5));

  CHECK_THROWS_AS(kl_divergence(p, make({0.0, 0.0}, {1.0, 1.0})), Error);
}

TEST_CASE("kl is nonnegative at random parameters") {
  Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    DiagGaussian q = make({rng.normal()}, {std::exp(rng.normal())});
    DiagGaussian p = make({rng.normal()}, {std::exp(rng.normal())});
    CHECK(kl_divergence(q, p) >= -1e-12);
  }
}

TEST_CASE("rw stays finite in the degenerate-support limit where kl blows up") {
  DiagGaussian prior = make({0.0, 0.0}, {1.0, 1.0});
  DiagGaussian collapsing = make({0.3, -0.2}, {1e-6, 1e-6});
  const double w = rw_divergence(collapsing, prior);
  CHECK(std::isfinite(w));
  CHECK(w < 10.0);
  CHECK(kl_divergence(collapsing, prior) > 10.0);

  // And it keeps growing as sigma shrinks further.
  DiagGaussian worse = make({0.3, -0.2}, {1e-9, 1e-9});
  CHECK(kl_divergence(worse, prior) > kl_divergence(collapsing, prior));
  CHECK(std::isfinite(rw_divergence(worse, prior)));
}

TEST_CASE("divergence sandwich on a bounded two-point space") {
  // P = Bernoulli(p), Q = Bernoulli(q) on {0, 1}: the RW transport cost with
  // quadratic Bregman distance is |p-q| * 1^2, total variation is |p-q|,
  // and the gradient Lipschitz constant of x^2 is 2 with diameter 1.
  auto kl_bernoulli = [](double p, double q) {
    return p * std::log(p / q) + (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
  };
  const double l_phi = 2.0, diam = 1.0;
  for (auto [p, q] : {std::pair{0.5, 0.3}, {0.9, 0.6}, {0.2, 0.25}, {0.7, 0.1}}) {
    const double rw = std::abs(p - q);
    const double tv = std::abs(p - q);
    CHECK(rw / (l_phi * diam * diam) <= tv + 1e-12);
    CHECK(tv <= std::sqrt(0.5 * kl_bernoulli(p, q)) + 1e-12);
  }
}
