// tests/test_autograd.cpp

// Copyright 2026  The creaklab Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.


#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <vector>

#include "creaklab/creaklab.hpp"
#include "gradcheck_suite.hpp"
#include "test_util.hpp"

using namespace creaklab;
using namespace creaklab::nn;

namespace {
Tensor vec(std::vector<double> v, bool grad = false) {
  const std::size_t n = v.size();
  return Tensor::from_data({n}, std::move(v), grad);
}
std::vector<double> values(const Tensor &t) { return {t.data().begin(), t.data().end()}; }
}  // namespace

TEST_CASE("conv1d: hand convolution", "[autograd][conv]") {
  auto x = Tensor::from_data({1, 4}, {1, 2, 3, 4});
  auto w = Tensor::from_data({1, 1, 2}, {1, 1});
  auto b = Tensor::zeros({1});
  REQUIRE(values(conv1d(x, w, b, 1, 0)) == std::vector<double>{3, 5, 7});
}

TEST_CASE("conv1d: identity kernel", "[autograd][conv]") {
  auto x = Tensor::from_data({1, 5}, {0.5, -1, 2, 7, 3});
  auto w = Tensor::from_data({1, 1, 1}, {1});
  REQUIRE(values(conv1d(x, w, Tensor::zeros({1}), 1, 0)) == values(x));
}

TEST_CASE("conv1d: kernel longer than input", "[autograd][conv]") {
  auto x = Tensor::zeros({1, 80});
  auto w = Tensor::zeros({1, 1, 81});
  try {
    conv1d(x, w, Tensor::zeros({1}), 1, 0);
    FAIL("no error");
  } catch (const Error &e) {
    REQUIRE(e.kind() == ErrorKind::ShapeMismatch);
  }
}

TEST_CASE("conv1d: length law over a sweep", "[autograd][conv]") {
  Rng r(4);
  for (std::size_t t = 1; t <= 14; ++t)
    for (std::size_t k = 1; k <= 6; ++k)
      for (std::size_t s = 1; s <= 4; ++s)
        for (std::size_t p = 0; p <= 3; ++p) {
          if (k > t + 2 * p) continue;
          auto x = testing::random_tensor({2, t}, r, -1, 1, false);
          auto w = testing::random_tensor({3, 2, k}, r, -1, 1, false);
          auto y = conv1d(x, w, Tensor::zeros({3}), s, p);
          REQUIRE(y.dim(1) == (t + 2 * p - k) / s + 1);
          // Direct-sum oracle for one output channel.
          for (std::size_t o = 0; o < y.dim(1); ++o) {
            double acc = 0.0;
            for (std::size_t c = 0; c < 2; ++c)
              for (std::size_t j = 0; j < k; ++j) {
                const long idx = long(o * s + j) - long(p);
                if (idx >= 0 && idx < long(t))
                  acc += x.data()[c * t + std::size_t(idx)] * w.data()[(1 * 2 + c) * k + j];
              }
            REQUIRE(y.data()[1 * y.dim(1) + o] == Catch::Approx(acc).margin(1e-12));
          }
        }
}

TEST_CASE("elementwise examples", "[autograd]") {
  REQUIRE(values(relu(vec({-1, 0, 2}))) == std::vector<double>{0, 0, 2});
  REQUIRE(sigmoid(vec({0})).item() == 0.5);
  Rng r(1);
  auto x = vec({0.3, -2, 5, 1e3});
  REQUIRE(values(dropout(x, 0.0, r, true)) == values(x));
  REQUIRE(values(dropout(x, 0.5, r, false)) == values(x));
}

TEST_CASE("dropout is unbiased", "[autograd][dropout]") {
  const double p = 0.3;
  const int n = 200000;
  auto x = Tensor::from_data({std::size_t(n)}, std::vector<double>(n, 2.0));
  Rng r(99);
  auto y = dropout(x, p, r, true);
  double mean = 0.0;
  for (double v : y.data()) mean += v;
  mean /= n;
  // Per-element variance of x*mask/(1-p) is x^2 p/(1-p).
  const double sigma = std::sqrt(4.0 * p / (1 - p) / n);
  REQUIRE(std::abs(mean - 2.0) <= 3 * sigma);
  for (double v : y.data()) REQUIRE((v == 0.0 || v == Catch::Approx(2.0 / (1 - p))));
}

TEST_CASE("bce examples", "[autograd][bce]") {
  auto l0 = Tensor::from_data({1, 1}, {0.0});
  REQUIRE(bce_with_logits(l0, {true}, {true}).item() == Catch::Approx(std::log(2.0)));
  auto l100 = Tensor::from_data({1, 1}, {100.0});
  const double big = bce_with_logits(l100, {true}, {true}).item();
  REQUIRE(std::isfinite(big));
  REQUIRE(big < 1e-40);
  auto l2 = Tensor::from_data({2, 1}, {0.0, 0.0});
  REQUIRE(bce_with_logits(l2, {true, false}, {true, false}).item() == Catch::Approx(std::log(2.0)));
  try {
    bce_with_logits(l2, {true, false}, {false, false});
    FAIL("no error");
  } catch (const Error &e) {
    REQUIRE(e.kind() == ErrorKind::EmptyMask);
  }
}

TEST_CASE("bce finite over the whole logit range", "[autograd][bce]") {
  for (double l = -1e4; l <= 1e4; l += 97.3) {
    for (bool y : {false, true}) {
      auto t = Tensor::from_data({1, 1}, {l}, true);
      auto loss = bce_with_logits(t, {y}, {true});
      REQUIRE(std::isfinite(loss.item()));
      loss.backward();
      REQUIRE(std::isfinite(t.grad()[0]));
      // Oracle: for large |l| the loss is |l| on the wrong side, ~0 otherwise.
      if (std::abs(l) > 50) {
        const bool wrong = (l > 0) != y;
        REQUIRE(loss.item() == Catch::Approx(wrong ? std::abs(l) : 0.0).margin(1e-12));
      }
    }
  }
}

TEST_CASE("backward examples", "[autograd]") {
  auto x = vec({1, 2, 3}, true);
  sum(x).backward();
  REQUIRE(values(Tensor::from_data({3}, {x.grad().begin(), x.grad().end()})) ==
          std::vector<double>{1, 1, 1});
  auto y = vec({1, 2}, true);
  sum(mul(y, y)).backward();
  REQUIRE(y.grad()[0] == 2.0);
  REQUIRE(y.grad()[1] == 4.0);
}

TEST_CASE("gradients accumulate until zeroed", "[autograd]") {
  auto x = vec({1, 2}, true);
  sum(x).backward();
  sum(scale(x, 3)).backward();
  REQUIRE(x.grad()[0] == 4.0);
  x.zero_grad();
  REQUIRE(x.grad()[1] == 0.0);
}

TEST_CASE("no-grad guard records no graph", "[autograd]") {
  auto x = vec({1, 2}, true);
  Tensor y;
  {
    NoGradGuard g;
    y = sum(x);
  }
  REQUIRE_FALSE(y.requires_grad());
  REQUIRE(sum(x).requires_grad());
}

TEST_CASE("non-scalar backward is rejected", "[autograd]") {
  auto x = vec({1, 2}, true);
  try {
    relu(x).backward();
    FAIL("no error");
  } catch (const Error &e) {
    REQUIRE(e.kind() == ErrorKind::NonScalarLoss);
  }
}

TEST_CASE("gradcheck: every op, 20 instances", "[autograd][gradcheck]") {
  for (const auto &c : testing::run_gradcheck_suite(20, 2024)) {
    INFO(c.op << " worst relative error " << c.worst);
    REQUIRE(c.instances >= 20);
    REQUIRE(c.worst < 1e-4);
  }
}

TEST_CASE("adam: closed-form first step", "[adam]") {
  AdamState st;
  std::vector<double> theta{1.0};
  std::vector<double> g{0.5};
  std::vector<std::span<double>> p{theta};
  std::vector<std::span<const double>> gs{g};
  adam_step(st, p, gs);
  REQUIRE(theta[0] == Catch::Approx(1.0 - 0.001 * (0.5 / (0.5 + 1e-8))).epsilon(1e-12));
  REQUIRE(theta[0] == Catch::Approx(0.999).margin(1e-9));
  REQUIRE(st.step_count == 1);
}

TEST_CASE("adam: zero gradient leaves parameters unchanged", "[adam]") {
  AdamState st;
  std::vector<double> theta{1.0, -2.0, 3.5};
  const auto before = theta;
  std::vector<double> g(3, 0.0);
  std::vector<std::span<double>> p{theta};
  std::vector<std::span<const double>> gs{g};
  for (int i = 0; i < 5; ++i) adam_step(st, p, gs);
  REQUIRE(theta == before);
}

TEST_CASE("adam: two steps are bitwise reproducible", "[adam]") {
  auto run = [] {
    Rng r(8);
    auto w = testing::random_tensor({3, 4}, r);
    auto b = testing::random_tensor({3}, r);
    auto x = testing::random_tensor({5, 4}, r, -1, 1, false);
    AdamState st;
    std::vector<Tensor> params{w, b};
    for (int s = 0; s < 2; ++s) {
      for (auto &t : params) t.zero_grad();
      auto loss = sum(mul(linear(x, w, b), linear(x, w, b)));
      loss.backward();
      adam_step(st, params);
    }
    std::vector<double> all = values(w);
    for (double v : b.data()) all.push_back(v);
    return all;
  };
  REQUIRE(run() == run());
}

TEST_CASE("adam: shape changes rejected", "[adam]") {
  AdamState st;
  std::vector<double> a{1.0}, g{1.0};
  std::vector<std::span<double>> p{a};
  std::vector<std::span<const double>> gs{g};
  adam_step(st, p, gs);
  std::vector<double> a2{1.0, 2.0}, g2{1.0, 1.0};
  std::vector<std::span<double>> p2{a2};
  std::vector<std::span<const double>> gs2{g2};
  try {
    adam_step(st, p2, gs2);
    FAIL("no error");
  } catch (const Error &e) {
    REQUIRE(e.kind() == ErrorKind::ShapeMismatch);
  }
}
