// Copyright 2026 The AGP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or
// implied. See the License for the specific language governing
// permissions and limitations under the License.


#include <cmath>
#include <numeric>

#include "agp/errors.hpp"
#include "agp/prune_net.hpp"
#include "doctest.h"
#include "gradcheck.hpp"
#include "oracles.hpp"

using namespace agp;

namespace {

NodeFeatures random_features(std::size_t n, std::size_t d, Rng& rng) {
  NodeFeatures x{Matrix(n + 1, d)};
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double& v : x.x.flat()) v = u(rng);
  return x;
}

oracle::Grid to_grid(const Matrix& m) {
  oracle::Grid g(m.rows(), std::vector<double>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) g[i][j] = m(i, j);
  return g;
}

}  // namespace

TEST_SUITE("prune_net") {

TEST_CASE("gcn is linear in the features and has the right shape") {
  Rng rng(1);
  const auto p = PruneNetParams::initialize({384, 64, 32}, rng);
  NodeFeatures zero{Matrix(16, 384)};
  const Matrix z = gcn_forward(zero, p);
  CHECK(z.rows() == 15);
  CHECK(z.cols() == 64);
  for (double v : z.flat()) CHECK(v == 0.0);
  NodeFeatures wrong{Matrix(16, 10)};
  CHECK_THROWS_AS(gcn_forward(wrong, p), DimensionError);
}

TEST_CASE("property: permuting agents permutes the latent rows") {
  Rng rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 6;
    const auto p = PruneNetParams::initialize({8, 6, 4}, rng);
    const NodeFeatures x = random_features(n, 8, rng);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    NodeFeatures px{x.x};
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t c = 0; c < 8; ++c) px.x(i, c) = x.x(perm[i], c);
    const Matrix z = gcn_forward(x, p);
    const Matrix pz = gcn_forward(px, p);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t c = 0; c < 6; ++c) CHECK(pz(i, c) == doctest::Approx(z(perm[i], c)).epsilon(1e-9));
  }
}

TEST_CASE("edge head") {
  Rng rng(3);
  auto p = PruneNetParams::initialize({8, 6, 4}, rng);
  const Matrix z = gcn_forward(random_features(5, 8, rng), p);
  const WeightMatrix w = edge_head(z, p);
  bool asym = false;
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(w(i, i) == 0.0);
    for (std::size_t j = 0; j < 5; ++j) asym |= std::abs(w(i, j) - w(j, i)) > 1e-6;
  }
  CHECK(asym);
  p.b_edge.fill(0.0);
  const WeightMatrix half = edge_head(z, p);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j) CHECK(half(i, j) == (i == j ? 0.0 : 0.5));
}

TEST_CASE("node head") {
  auto p = PruneNetParams::zeros({8, 6, 4});
  const Matrix z(5, 6);
  auto [s, y] = node_head(z, p);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(s[i] == 0.0);
    CHECK(y[i] == 0.5);
  }
  p.mlp_b2(0, 0) = 10.0;
  auto [s2, y2] = node_head(z, p);
  for (double v : y2) CHECK(v == doctest::Approx(0.9999546).epsilon(1e-6));
  Rng rng(4);
  const auto q = PruneNetParams::initialize({8, 6, 4}, rng);
  for (double v : node_head(gcn_forward(random_features(5, 8, rng), q), q).second) {
    CHECK(v > 0.0);
    CHECK(v < 1.0);
  }
}

TEST_CASE("gumbel sigmoid") {
  Rng rng(5);
  CHECK(gumbel_sigmoid(0.0, 0.3, rng, GumbelMode::kDeterministic, false) == 0.5);
  CHECK(gumbel_sigmoid(2.0, 1.0, rng, GumbelMode::kDeterministic, false) ==
        doctest::Approx(1.0 / (1.0 + std::exp(-2.0))));
  CHECK(gumbel_sigmoid(2.0, 0.1, rng, GumbelMode::kDeterministic, false) ==
        doctest::Approx(1.0 / (1.0 + std::exp(-20.0))));
  double mean = 0.0;
  for (int i = 0; i < 100000; ++i) mean += gumbel_sigmoid(0.0, 0.5, rng, GumbelMode::kStochastic, true);
  CHECK(std::abs(mean / 100000.0 - 0.5) < 0.01);
  CHECK(gumbel_sigmoid(0.3, 1.0, rng, GumbelMode::kDeterministic, true) == 1.0);
  CHECK_THROWS_AS(gumbel_sigmoid(0.0, 0.0, rng, GumbelMode::kDeterministic, false), ConfigError);
}

TEST_CASE("edge loss hand example") {
  Matrix w(3, 3, 0.5);
  for (std::size_t i = 0; i < 3; ++i) w(i, i) = 0.0;
  Matrix a(3, 3);
  a(0, 1) = 1.0;
  const NodeMask y(std::vector<std::uint8_t>{1, 1, 0});
  CHECK(std::abs(edge_loss(w, WeightMatrix(a), y, 0.5) - 0.375) < 1e-9);
  CHECK(std::abs(oracle::edge_loss(to_grid(w), to_grid(a), {1, 1, 0}, 0.5) - 0.375) < 1e-9);
}

TEST_CASE("edge loss vanishes on a perfect prediction and with a full mask") {
  Matrix a(4, 4);
  a(0, 1) = a(1, 0) = a(1, 2) = 1.0;
  const NodeMask y(std::vector<std::uint8_t>{1, 1, 1, 0});
  CHECK(edge_loss(a, WeightMatrix(a), y, 0.5) == 0.0);
  Matrix w(4, 4, 0.3);
  for (std::size_t i = 0; i < 4; ++i) w(i, i) = 0.0;
  const NodeMask all(std::vector<std::uint8_t>{1, 1, 1, 1});
  // Only the in-support term remains.
  CHECK(edge_loss(w, WeightMatrix(4), all, 0.5) == doctest::Approx(0.09));
}

TEST_CASE("node loss hand example") {
  Matrix w(2, 2);
  w(1, 0) = 0.8;
  const std::vector<double> y_hat = {0.5, 0.5};
  const NodeMask y(std::vector<std::uint8_t>{1, 0});
  const double want = std::log(2.0) + 0.05 + 0.01;
  CHECK(std::abs(node_loss(y_hat, y, w, 0.1, 0.05, false) - want) < 1e-9);
  CHECK(std::abs(oracle::node_loss(y_hat, {1, 0}, to_grid(w), 0.1, 0.05) - want) < 1e-9);
  CHECK(std::abs(want - 0.7531) < 1e-4);
}

TEST_CASE("node loss edge cases") {
  const Matrix w(3, 3);
  const NodeMask y(std::vector<std::uint8_t>{1, 0, 1});
  const std::vector<double> exact = {1.0, 0.0, 1.0};
  const double l = node_loss(exact, y, w, 0.1, 0.05, false);
  CHECK(l == doctest::Approx(0.1 * 2.0 / 3.0).epsilon(1e-5));
  Matrix heavy(3, 3, 0.9);
  const NodeMask all(std::vector<std::uint8_t>{1, 1, 1});
  const std::vector<double> half = {0.5, 0.5, 0.5};
  CHECK(node_loss(half, all, heavy, 0.0, 1.0, false) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("property: losses agree with the reference formulas") {
  Rng rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng() % 8;
    Matrix w(n, n), a(n, n);
    std::vector<std::uint8_t> bits(n);
    std::vector<int> ybits(n);
    std::vector<double> y_hat(n);
    for (std::size_t i = 0; i < n; ++i) {
      bits[i] = static_cast<std::uint8_t>(rng() % 2);
      ybits[i] = bits[i];
      y_hat[i] = u(rng);
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) {
          w(i, j) = u(rng);
          if (bits[i] && bits[j]) a(i, j) = static_cast<double>(rng() % 2);
        }
    const NodeMask y(bits);
    const double lo = u(rng);
    CHECK(edge_loss(w, WeightMatrix(a), y, lo) ==
          doctest::Approx(oracle::edge_loss(to_grid(w), to_grid(a), ybits, lo)).epsilon(1e-12));
    CHECK(node_loss(y_hat, y, w, 0.1, 0.05, false) ==
          doctest::Approx(oracle::node_loss(y_hat, ybits, to_grid(w), 0.1, 0.05)).epsilon(1e-12));
    const double focal_extra = oracle::node_loss(y_hat, ybits, to_grid(w), 0.1, 0.05) -
                               oracle::node_loss(y_hat, ybits, to_grid(w), 0.0, 0.0);
    CHECK(node_loss(y_hat, y, w, 0.1, 0.05, true, 2.0) ==
          doctest::Approx(oracle::focal_mean(y_hat, ybits, 2.0) + focal_extra).epsilon(1e-12));
  }
}

TEST_CASE("total loss") {
  CHECK(std::abs(total_loss(0.375, 0.7531, 1.0) - 1.1281) < 1e-12);
  CHECK(total_loss(0.375, 0.7531, 0.0) == 0.375);
  CHECK(total_loss(1.0, 1.0, 1.333) == doctest::Approx(2.333));
}

TEST_CASE("loss size mismatches raise DimensionError") {
  CHECK_THROWS_AS(edge_loss(Matrix(3, 3), WeightMatrix(4), NodeMask(3), 0.5), DimensionError);
  const std::vector<double> y_hat = {0.5, 0.5};
  CHECK_THROWS_AS(node_loss(y_hat, NodeMask(3), Matrix(3, 3), 0.1, 0.05, false), DimensionError);
}

TEST_CASE("analytic gradient matches finite differences") {
  for (std::uint64_t seed = 100; seed < 106; ++seed) {
    const auto r = gradcheck::check_instance(seed, 5, 8, 6, 4);
    CHECK(r.max_rel < 1e-4);
  }
}

TEST_CASE("checkpoint round-trip") {
  Rng rng(8);
  Checkpoint c;
  c.params = PruneNetParams::initialize({8, 6, 4}, rng);
  c.n_max = 5;
  c.config.beta = 0.75;
  c.config.hidden = 6;
  c.config.mask_hidden = 4;
  const std::string text = dump_checkpoint(c);
  const Checkpoint back = parse_checkpoint(text);
  CHECK(back.params == c.params);
  CHECK(back.n_max == 5);
  CHECK(back.config.beta == 0.75);
  CHECK(dump_checkpoint(back) == text);
}

TEST_CASE("checkpoint errors") {
  CHECK_THROWS_AS(parse_checkpoint("garbage"), CheckpointError);
  CHECK_THROWS_AS(parse_checkpoint(R"({"format":"other"})"), CheckpointError);
  Rng rng(9);
  Checkpoint c;
  c.params = PruneNetParams::initialize({8, 6, 4}, rng);
  c.n_max = 5;
  std::string text = dump_checkpoint(c);
  std::string bumped = text;
  bumped.replace(bumped.find("\"version\":1"), 11, "\"version\":9");
  CHECK_THROWS_AS(parse_checkpoint(bumped), CheckpointError);
  std::string resized = text;
  resized.replace(resized.find("\"d\":8"), 5, "\"d\":9");
  CHECK_THROWS_AS(parse_checkpoint(resized), CheckpointError);
}

}  // TEST_SUITE
