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


#include <algorithm>
#include <numeric>
#include <random>

#include "agp/errors.hpp"
#include "agp/graph.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace agp;

namespace {

WeightMatrix weights_from(const oracle::Grid& g) {
  Matrix m(g.size(), g.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = 0; j < g.size(); ++j) m(i, j) = g[i][j];
  return WeightMatrix(m);
}

std::vector<AgentId> random_members(std::mt19937_64& rng, std::size_t n_max) {
  std::uniform_int_distribution<std::size_t> size(2, n_max);
  std::vector<AgentId> ids(n_max);
  std::iota(ids.begin(), ids.end(), AgentId{0});
  std::shuffle(ids.begin(), ids.end(), rng);
  ids.resize(size(rng));
  std::sort(ids.begin(), ids.end());
  return ids;
}

Topology random_topology(std::mt19937_64& rng, std::size_t n) {
  std::bernoulli_distribution coin(0.5);
  std::vector<std::uint8_t> adj(n * n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) adj[i * n + j] = coin(rng);
  return Topology(n, adj);
}

WeightMatrix random_weights(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) m(i, j) = u(rng);
  return WeightMatrix(m);
}

}  // namespace

TEST_SUITE("graph") {

TEST_CASE("lift places a single edge at the member ids") {
  Topology sub(2, {0, 1, 0, 0});
  const std::vector<AgentId> members = {3, 7};
  auto [w, mask] = lift_subgraph(sub, members, 16);
  CHECK(mask.active_ids() == members);
  for (std::size_t i = 0; i < 16; ++i)
    for (std::size_t j = 0; j < 16; ++j) CHECK(w(i, j) == ((i == 3 && j == 7) ? 1.0 : 0.0));
}

TEST_CASE("lift of an edgeless pair is all zero") {
  const std::vector<AgentId> members = {0, 1};
  auto [w, mask] = lift_subgraph(Topology::empty(2), members, 16);
  CHECK(mask.active_count() == 2);
  CHECK(w == WeightMatrix(16));
}

TEST_CASE("lift of K3 matches the enumerated ordered pairs") {
  const std::vector<AgentId> members = {2, 5, 9};
  auto [w, mask] = lift_subgraph(Topology::complete(3), members, 16);
  const auto expected = oracle::lift({{0, 1, 1}, {1, 0, 1}, {1, 1, 0}}, {2, 5, 9}, 16);
  std::size_t ones = 0;
  for (std::size_t i = 0; i < 16; ++i)
    for (std::size_t j = 0; j < 16; ++j) {
      CHECK(w(i, j) == expected[i][j]);
      ones += w(i, j) == 1.0;
    }
  CHECK(ones == 6);
}

TEST_CASE("lift rejects bad member lists") {
  const auto k2 = Topology::complete(2);
  CHECK_THROWS_AS(lift_subgraph(k2, std::vector<AgentId>{3, 3}, 16), InvalidMembers);
  CHECK_THROWS_AS(lift_subgraph(k2, std::vector<AgentId>{3, 16}, 16), InvalidMembers);
  CHECK_THROWS_AS(lift_subgraph(k2, std::vector<AgentId>{7, 3}, 16), InvalidMembers);
  CHECK_THROWS_AS(lift_subgraph(k2, std::vector<AgentId>{1, 2, 3}, 16), InvalidMembers);
}

TEST_CASE("property: lift then restrict is the identity") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n_max = 2 + rng() % 15;
    const auto members = random_members(rng, n_max);
    const Topology sub = random_topology(rng, members.size());
    auto [w, mask] = lift_subgraph(sub, members, n_max);
    REQUIRE(restrict_to(w, members) == sub);
    CHECK(mask.active_ids() == members);
  }
}

TEST_CASE("induce with a full mask keeps the weights") {
  std::mt19937_64 rng(2);
  const WeightMatrix w = random_weights(rng, 6);
  NodeMask all(std::vector<std::uint8_t>(6, 1));
  const CommTopology t = induce(w, all);
  CHECK(t.weights() == w);
  CHECK(t.mask() == all);
}

TEST_CASE("induce keeps only edges between active nodes") {
  const std::vector<AgentId> members = {2, 5, 9};
  auto [w, mask] = lift_subgraph(Topology::complete(3), members, 16);
  const std::vector<AgentId> active = {2, 5};
  const CommTopology t = induce(w, NodeMask::from_members(active, 16));
  for (std::size_t i = 0; i < 16; ++i)
    for (std::size_t j = 0; j < 16; ++j) {
      const bool kept = (i == 2 && j == 5) || (i == 5 && j == 2);
      CHECK(t.weights()(i, j) == (kept ? 1.0 : 0.0));
    }
}

TEST_CASE("induce errors") {
  CHECK_THROWS_AS(induce(WeightMatrix(4), NodeMask(5)), DimensionError);
  const std::vector<AgentId> one = {1};
  CHECK_THROWS_AS(induce(WeightMatrix(4), NodeMask::from_members(one, 4)), DegenerateTopology);
}

TEST_CASE("property: induce is idempotent") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng() % 10;
    const WeightMatrix w = random_weights(rng, n);
    const NodeMask mask = NodeMask::from_members(random_members(rng, n), n);
    const CommTopology once = induce(w, mask);
    CHECK(induce(once.weights(), mask) == once);
  }
}

TEST_CASE("binarize threshold semantics") {
  oracle::Grid g = {{0, 0.5}, {0, 0}};
  CHECK(binarize(weights_from(g), 0.5).edge(0, 1));
  CHECK(binarize(WeightMatrix(3), 0.5).edge_count() == 0);
  g = {{0, 0.49}, {0.51, 0}};
  const Topology t = binarize(weights_from(g), 0.5);
  CHECK(t.edge_count() == 1);
  CHECK(t.edge(1, 0));
}

TEST_CASE("property: binarize edge count is non-increasing in theta") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const WeightMatrix w = random_weights(rng, 7);
    std::size_t prev = binarize(w, 0.01).edge_count();
    for (double theta = 0.05; theta < 1.0; theta += 0.05) {
      const std::size_t now = binarize(w, theta).edge_count();
      CHECK(now <= prev);
      prev = now;
    }
  }
}

TEST_CASE("supervision pair validation") {
  const std::vector<AgentId> members = {1, 3};
  auto [w, mask] = lift_subgraph(Topology::complete(2), members, 5);
  SupervisionPair ok{"t", "text", Category::kMathReasoning, w, mask, 1.0};
  CHECK_NOTHROW(validate(ok));

  Matrix leak = w.matrix();
  leak(0, 1) = 1.0;
  SupervisionPair bad = ok;
  bad.a_gt = WeightMatrix(leak);
  CHECK_THROWS_AS(validate(bad), ValidationError);

  bad = ok;
  bad.score = 1.5;
  CHECK_THROWS_AS(validate(bad), ValidationError);

  bad = ok;
  const std::vector<AgentId> one = {1};
  bad.y = NodeMask::from_members(one, 5);
  bad.a_gt = WeightMatrix(5);
  CHECK_THROWS_AS(validate(bad), ValidationError);
}

TEST_CASE("weight matrix and topology constructors validate") {
  Matrix diag(2, 2);
  diag(0, 0) = 0.3;
  CHECK_THROWS_AS(WeightMatrix{diag}, ValidationError);
  Matrix big(2, 2);
  big(0, 1) = 1.5;
  CHECK_THROWS_AS(WeightMatrix{big}, ValidationError);
  CHECK_THROWS_AS(Topology(2, {1, 0, 0, 0}), ValidationError);
  CHECK_THROWS_AS(NodeMask(std::vector<std::uint8_t>{0, 2}), ValidationError);
  CHECK_THROWS_AS(CommTopology(NodeMask(3), WeightMatrix(4)), DimensionError);
}

TEST_CASE("dot export lists active nodes and heavy edges") {
  const std::vector<AgentId> members = {0, 1};
  auto [w, mask] = lift_subgraph(Topology(2, {0, 1, 0, 0}), members, 3);
  const std::string dot = serialize_topology(CommTopology(mask, w), TopologyFormat::kDot);
  CHECK(dot.find("0 -> 1 [label=\"1.000\"]") != std::string::npos);
  CHECK(dot.find("  2;") == std::string::npos);
  CHECK(dot.find("  0;") != std::string::npos);
  CHECK(dot.rfind("digraph", 0) == 0);
}

TEST_CASE("dot labels a fractional weight to three decimals") {
  oracle::Grid g = {{0, 0.87654, 0.2}, {0.5, 0, 0}, {0, 0, 0}};
  const CommTopology t(NodeMask(std::vector<std::uint8_t>{1, 1, 1}), weights_from(g));
  const std::string dot = serialize_topology(t, TopologyFormat::kDot);
  CHECK(dot.find("0 -> 1 [label=\"0.877\"]") != std::string::npos);
  CHECK(dot.find("1 -> 0 [label=\"0.500\"]") != std::string::npos);
  CHECK(dot.find("0 -> 2") == std::string::npos);
}

TEST_CASE("property: json round-trip is lossless") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + rng() % 14;
    const CommTopology t =
        induce(random_weights(rng, n), NodeMask::from_members(random_members(rng, n), n));
    CHECK(parse_topology(serialize_topology(t, TopologyFormat::kJson)) == t);
  }
}

TEST_CASE("parse_topology rejects malformed input") {
  CHECK_THROWS_AS(parse_topology("not json"), FormatError);
  CHECK_THROWS_AS(parse_topology(R"({"n_max":2,"mask":[1,1]})"), FormatError);
  CHECK_THROWS_AS(parse_topology(R"({"n_max":2,"mask":[1,0],"weights":[[0,1],[0,0]]})"),
                  ValidationError);
}

TEST_CASE("category names round-trip") {
  for (Category c : {Category::kGeneralReasoning, Category::kMathReasoning,
                     Category::kCodeGeneration})
    CHECK(parse_category(to_string(c)) == c);
}

}  // TEST_SUITE
