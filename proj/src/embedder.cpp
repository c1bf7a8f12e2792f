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

#include "agp/embedder.hpp"

#include <cctype>
#include <cmath>
#include <cstdint>

#include "agp/errors.hpp"
#include "http_util.hpp"
#include "json_util.hpp"
#include "parallel.hpp"

namespace agp {

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

HashingEmbedding::HashingEmbedding(std::size_t dim, std::size_t bins) : dim_(dim), bins_(bins) {
  if (bins_ == 0 || bins_ > dim_) throw ConfigError("hashing embedding needs 0 < bins <= dim");
}

std::vector<double> HashingEmbedding::embed_raw(std::string_view text) {
  std::vector<double> v(dim_, 0.0);
  std::size_t grams = 0;
  auto add_word = [&](const std::string& word) {
    const std::string padded = "#" + word + "#";
    for (std::size_t i = 0; i + 3 <= padded.size(); ++i) {
      // Signed hashing trick: the top hash bit picks the sign.
      const std::uint64_t h = fnv1a(std::string_view(padded).substr(i, 3));
      v[h % bins_] += (h >> 63) ? -1.0 : 1.0;
      ++grams;
    }
  };
  std::string word;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      word.push_back(static_cast<char>(std::tolower(c)));
    } else if (!word.empty()) {
      add_word(word);
      word.clear();
    }
  }
  if (!word.empty()) add_word(word);
  if (grams == 0) v[fnv1a("##") % bins_] = 1.0;
  // Opposite-signed grams can cancel; fall back to the empty-text vector.
  bool zero = true;
  for (double x : v) zero = zero && x == 0.0;
  if (zero) v[fnv1a("##") % bins_] = 1.0;
  return v;
}

HttpEmbedding::HttpEmbedding(std::string endpoint, std::string api_key, std::size_t dim,
                             std::chrono::milliseconds timeout)
    : endpoint_(std::move(endpoint)), api_key_(std::move(api_key)), dim_(dim), timeout_(timeout) {
  detail::split_url(endpoint_);  // validates
}

std::vector<double> HttpEmbedding::embed_raw(std::string_view text) {
  detail::json req;
  req["input"] = std::string(text);
  const auto reply = detail::post_json(endpoint_, req.dump(), api_key_, timeout_);
  if (!reply) throw EmbeddingUnavailable("embedding endpoint unreachable: " + endpoint_);
  if (reply->status != 200)
    throw EmbeddingUnavailable("embedding endpoint returned HTTP " + std::to_string(reply->status));
  try {
    const auto j = detail::json::parse(reply->body);
    return j.at("embedding").get<std::vector<double>>();
  } catch (const detail::json::exception& e) {
    throw EmbeddingUnavailable(std::string("malformed embedding response: ") + e.what());
  }
}

std::vector<double> MemoizedEmbedding::embed_raw(std::string_view text) {
  {
    std::lock_guard lock(mu_);
    if (auto it = memo_.find(text); it != memo_.end()) return it->second;
  }
  auto v = inner_->embed_raw(text);
  std::lock_guard lock(mu_);
  memo_.emplace(std::string(text), v);
  return v;
}

std::vector<double> embed_text(EmbeddingBackend& backend, std::string_view text) {
  std::vector<double> v = backend.embed_raw(text);
  if (v.size() != backend.dim())
    throw EmbeddingUnavailable("embedding has " + std::to_string(v.size()) +
                               " entries, backend declares " + std::to_string(backend.dim()));
  double sq = 0.0;
  for (double x : v) {
    if (!std::isfinite(x)) throw EmbeddingUnavailable("embedding has non-finite entries");
    sq += x * x;
  }
  if (sq == 0.0) throw EmbeddingUnavailable("embedding is the zero vector");
  const double inv = 1.0 / std::sqrt(sq);
  for (double& x : v) x *= inv;
  return v;
}

std::string agent_feature_text(const AgentProfile& p) { return p.role + " " + p.expertise; }

NodeFeatures build_node_features(const AgentPool& pool, std::string_view query,
                                 EmbeddingBackend& backend, std::size_t parallelism) {
  const std::size_t n = pool.n_max();
  NodeFeatures f{Matrix(n + 1, backend.dim())};
  if (!backend.thread_safe()) parallelism = 1;
  detail::parallel_for(n + 1, parallelism, [&](std::size_t i) {
    const auto v = i < n ? embed_text(backend, agent_feature_text(pool[i]))
                         : embed_text(backend, query);
    std::copy(v.begin(), v.end(), f.x.row(i).begin());
  });
  return f;
}

}  // namespace agp
