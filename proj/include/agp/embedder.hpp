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

#ifndef AGP_EMBEDDER_HPP_
#define AGP_EMBEDDER_HPP_

#include <chrono>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "agp/agent_pool.hpp"
#include "agp/matrix.hpp"

namespace agp {

inline constexpr std::size_t kDefaultEmbeddingDim = 384;

/// Text embedding provider. Implementations return raw vectors; callers go
/// through embed_text, which normalizes.
class EmbeddingBackend {
 public:
  virtual ~EmbeddingBackend() = default;
  virtual std::size_t dim() const = 0;
  /// Throws EmbeddingUnavailable on failure.
  virtual std::vector<double> embed_raw(std::string_view text) = 0;
  /// False when concurrent embed_raw calls are unsafe.
  virtual bool thread_safe() const { return true; }
};

/// Offline, reproducible backend: character 3-grams of every lowercase word
/// (with '#' word boundaries) hashed into `bins` counters, zero-padded to
/// `dim`. Text with no words maps to the single "##" boundary gram.
class HashingEmbedding : public EmbeddingBackend {
 public:
  explicit HashingEmbedding(std::size_t dim = kDefaultEmbeddingDim, std::size_t bins = 64);
  std::size_t dim() const override { return dim_; }
  std::vector<double> embed_raw(std::string_view text) override;

 private:
  std::size_t dim_;
  std::size_t bins_;
};

/// POST {"input": text} -> {"embedding": [floats]} against a configured URL.
class HttpEmbedding : public EmbeddingBackend {
 public:
  HttpEmbedding(std::string endpoint, std::string api_key, std::size_t dim,
                std::chrono::milliseconds timeout = std::chrono::seconds(30));
  std::size_t dim() const override { return dim_; }
  std::vector<double> embed_raw(std::string_view text) override;

 private:
  std::string endpoint_;
  std::string api_key_;
  std::size_t dim_;
  std::chrono::milliseconds timeout_;
};

/// In-memory memo keyed by text in front of another backend.
class MemoizedEmbedding : public EmbeddingBackend {
 public:
  explicit MemoizedEmbedding(std::shared_ptr<EmbeddingBackend> inner) : inner_(std::move(inner)) {}
  std::size_t dim() const override { return inner_->dim(); }
  std::vector<double> embed_raw(std::string_view text) override;
  bool thread_safe() const override { return inner_->thread_safe(); }

 private:
  std::shared_ptr<EmbeddingBackend> inner_;
  std::mutex mu_;
  std::map<std::string, std::vector<double>, std::less<>> memo_;
};

/// Unit-L2 embedding of `text`. Throws EmbeddingUnavailable when the backend
/// fails, returns the wrong size, or produces a zero / non-finite vector.
std::vector<double> embed_text(EmbeddingBackend& backend, std::string_view text);

/// Text embedded for agent `p`: role and expertise joined by a space.
std::string agent_feature_text(const AgentProfile& p);

/// (n_max + 1) x d feature matrix: one row per agent, then the query row.
struct NodeFeatures {
  Matrix x;
  std::size_t n_max() const { return x.rows() - 1; }
};

NodeFeatures build_node_features(const AgentPool& pool, std::string_view query,
                                 EmbeddingBackend& backend, std::size_t parallelism = 1);

}  // namespace agp

#endif  // AGP_EMBEDDER_HPP_
