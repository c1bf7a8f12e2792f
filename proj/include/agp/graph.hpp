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

// Graph value types shared by the collector, the pruning network and the
// orchestrator. Every matrix is indexed [from][to]: entry (i, j) describes
// the directed edge agent i -> agent j.

#ifndef AGP_GRAPH_HPP_
#define AGP_GRAPH_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "agp/matrix.hpp"

namespace agp {

using AgentId = std::size_t;

/// Unweighted directed graph on n nodes with a zero diagonal.
class Topology {
 public:
  Topology() = default;
  /// `adj` is row-major n*n with entries in {0,1}; throws ValidationError.
  Topology(std::size_t n, std::vector<std::uint8_t> adj);

  static Topology empty(std::size_t n);
  static Topology complete(std::size_t n);

  std::size_t n() const { return n_; }
  bool edge(std::size_t from, std::size_t to) const { return adj_[from * n_ + to] != 0; }
  std::size_t edge_count() const;

  friend bool operator==(const Topology&, const Topology&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::uint8_t> adj_;
};

/// Square matrix with entries in [0,1] and a zero diagonal.
class WeightMatrix {
 public:
  WeightMatrix() = default;
  explicit WeightMatrix(std::size_t n) : w_(n, n) {}
  /// Throws ValidationError when the matrix is not square, has an entry
  /// outside [0,1] or a nonzero diagonal.
  explicit WeightMatrix(Matrix w);

  std::size_t n() const { return w_.rows(); }
  double operator()(std::size_t from, std::size_t to) const { return w_(from, to); }
  const Matrix& matrix() const { return w_; }

  friend bool operator==(const WeightMatrix&, const WeightMatrix&) = default;

 private:
  Matrix w_;
};

/// Binary per-agent retention mask.
class NodeMask {
 public:
  NodeMask() = default;
  explicit NodeMask(std::size_t n) : bits_(n, 0) {}
  /// Throws ValidationError on entries other than 0/1.
  explicit NodeMask(std::vector<std::uint8_t> bits);

  static NodeMask from_members(std::span<const AgentId> members, std::size_t n);

  std::size_t n() const { return bits_.size(); }
  bool operator[](std::size_t i) const { return bits_[i] != 0; }
  std::size_t active_count() const;
  std::vector<AgentId> active_ids() const;
  const std::vector<std::uint8_t>& bits() const { return bits_; }

  friend bool operator==(const NodeMask&, const NodeMask&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

enum class Category { kGeneralReasoning, kMathReasoning, kCodeGeneration };

std::string_view to_string(Category c);
/// Accepts general_reasoning / math_reasoning / code_generation.
Category parse_category(std::string_view s);

/// One mined training label in the n_max reference frame.
struct SupervisionPair {
  std::string task_id;
  std::string task_text;
  Category category = Category::kGeneralReasoning;
  WeightMatrix a_gt;
  NodeMask y;
  double score = 0.0;
};

/// Throws ValidationError unless the pair's edges vanish outside its mask,
/// at least two nodes are active and the score lies in [0,1].
void validate(const SupervisionPair& pair);

/// Executable topology: a node mask plus the weights of the induced graph.
class CommTopology {
 public:
  CommTopology() = default;
  /// Throws DimensionError on a size mismatch and ValidationError when a
  /// masked-out node carries weight.
  CommTopology(NodeMask mask, WeightMatrix weights);

  std::size_t n() const { return mask_.n(); }
  const NodeMask& mask() const { return mask_; }
  const WeightMatrix& weights() const { return weights_; }

  friend bool operator==(const CommTopology&, const CommTopology&) = default;

 private:
  NodeMask mask_;
  WeightMatrix weights_;
};

/// Re-indexes `sub` into the n_max frame: sub node k becomes agent members[k].
/// Throws InvalidMembers for unsorted, duplicate or out-of-range ids or when
/// the member count differs from sub.n().
std::pair<WeightMatrix, NodeMask> lift_subgraph(const Topology& sub,
                                                std::span<const AgentId> members,
                                                std::size_t n_max);

/// Inverse of lift_subgraph on the member rows/columns (entries >= 0.5 are edges).
Topology restrict_to(const WeightMatrix& lifted, std::span<const AgentId> members);

/// Zeroes rows and columns of masked-out nodes. Throws DimensionError on a
/// size mismatch and DegenerateTopology when fewer than two nodes remain.
CommTopology induce(const WeightMatrix& weights, const NodeMask& mask);

/// Edge i->j kept iff weights(i, j) >= theta.
Topology binarize(const WeightMatrix& weights, double theta);

enum class TopologyFormat { kJson, kDot };

/// JSON: {"n_max", "mask", "weights"}. DOT: one node per active agent, one
/// edge per weight >= 0.5 labelled with the weight to three decimals.
/// `labels`, when given, must hold one display name per node.
std::string serialize_topology(const CommTopology& t, TopologyFormat format,
                               std::span<const std::string> labels = {});

/// Parses the JSON form. Throws FormatError / ValidationError.
CommTopology parse_topology(std::string_view json);

}  // namespace agp

#endif  // AGP_GRAPH_HPP_
