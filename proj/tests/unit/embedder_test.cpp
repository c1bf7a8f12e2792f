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
#include <memory>

#include "agp/agent_pool.hpp"
#include "agp/embedder.hpp"
#include "agp/errors.hpp"
#include "doctest.h"

using namespace agp;

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

class CountingBackend : public EmbeddingBackend {
 public:
  std::size_t dim() const override { return 4; }
  std::vector<double> embed_raw(std::string_view) override {
    ++calls;
    return {1.0, 2.0, 2.0, 0.0};
  }
  int calls = 0;
};

class BrokenBackend : public EmbeddingBackend {
 public:
  explicit BrokenBackend(std::vector<double> v) : v_(std::move(v)) {}
  std::size_t dim() const override { return 3; }
  std::vector<double> embed_raw(std::string_view) override { return v_; }

 private:
  std::vector<double> v_;
};

}  // namespace

TEST_SUITE("embedder") {

TEST_CASE("hashing backend is deterministic and unit norm") {
  HashingEmbedding h;
  const auto a = embed_text(h, "Solve the integer equation");
  CHECK(a == embed_text(h, "Solve the integer equation"));
  CHECK(a.size() == kDefaultEmbeddingDim);
  CHECK(std::abs(dot(a, a) - 1.0) < 1e-6);
  // Only the first 64 bins are used.
  for (std::size_t i = 64; i < a.size(); ++i) CHECK(a[i] == 0.0);
}

TEST_CASE("different single letters are not parallel") {
  HashingEmbedding h;
  CHECK(dot(embed_text(h, "a"), embed_text(h, "b")) < 1.0);
}

TEST_CASE("empty text embeds to a fixed unit vector") {
  HashingEmbedding h;
  const auto e = embed_text(h, "");
  CHECK(std::abs(dot(e, e) - 1.0) < 1e-9);
  CHECK(e == embed_text(h, "  ...  "));
}

TEST_CASE("case and punctuation do not change the embedding") {
  HashingEmbedding h;
  CHECK(embed_text(h, "Prime Numbers!") == embed_text(h, "prime numbers"));
}

TEST_CASE("embed_text normalizes and validates backend output") {
  CountingBackend c;
  const auto v = embed_text(c, "x");
  CHECK(v[0] == doctest::Approx(1.0 / 3.0));
  CHECK(v[1] == doctest::Approx(2.0 / 3.0));
  BrokenBackend zero({0.0, 0.0, 0.0});
  CHECK_THROWS_AS(embed_text(zero, "x"), EmbeddingUnavailable);
  BrokenBackend nan({1.0, NAN, 0.0});
  CHECK_THROWS_AS(embed_text(nan, "x"), EmbeddingUnavailable);
  BrokenBackend short_vec({1.0});
  CHECK_THROWS_AS(embed_text(short_vec, "x"), EmbeddingUnavailable);
}

TEST_CASE("memo calls the inner backend once per text") {
  auto inner = std::make_shared<CountingBackend>();
  MemoizedEmbedding memo(inner);
  embed_text(memo, "a");
  embed_text(memo, "a");
  embed_text(memo, "b");
  CHECK(inner->calls == 2);
}

TEST_CASE("node features shape and query locality") {
  HashingEmbedding h;
  const AgentPool& pool = default_pool();
  const NodeFeatures f1 = build_node_features(pool, "sum of two primes", h);
  const NodeFeatures f2 = build_node_features(pool, "write a python parser", h);
  CHECK(f1.x.rows() == 16);
  CHECK(f1.x.cols() == 384);
  CHECK(f1.n_max() == 15);
  for (std::size_t r = 0; r < 15; ++r)
    for (std::size_t c = 0; c < 384; ++c) CHECK(f1.x(r, c) == f2.x(r, c));
  bool differs = false;
  for (std::size_t c = 0; c < 384; ++c) differs |= f1.x(15, c) != f2.x(15, c);
  CHECK(differs);
  CHECK_NOTHROW(build_node_features(pool, "", h));
}

TEST_CASE("agent rows embed role and expertise") {
  HashingEmbedding h;
  const AgentProfile& p = default_pool()[3];
  CHECK(agent_feature_text(p) == p.role + " " + p.expertise);
  const NodeFeatures f = build_node_features(default_pool(), "q", h);
  const auto row = embed_text(h, agent_feature_text(p));
  for (std::size_t c = 0; c < row.size(); ++c) CHECK(f.x(3, c) == row[c]);
}

TEST_CASE("parallel feature building matches serial") {
  HashingEmbedding h;
  const NodeFeatures a = build_node_features(default_pool(), "query text", h, 1);
  const NodeFeatures b = build_node_features(default_pool(), "query text", h, 4);
  CHECK(a.x == b.x);
}

}  // TEST_SUITE
