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

#include "agp/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "agp/errors.hpp"
#include "json_util.hpp"

namespace agp {

Topology::Topology(std::size_t n, std::vector<std::uint8_t> adj) : n_(n), adj_(std::move(adj)) {
  if (adj_.size() != n_ * n_)
    throw ValidationError("topology: adjacency has " + std::to_string(adj_.size()) +
                          " entries, expected " + std::to_string(n_ * n_));
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) {
      const auto v = adj_[i * n_ + j];
      if (v > 1) throw ValidationError("topology: adjacency entry not in {0,1}");
      if (i == j && v != 0) throw ValidationError("topology: self-loop at node " + std::to_string(i));
    }
  }
}

Topology Topology::empty(std::size_t n) { return Topology(n, std::vector<std::uint8_t>(n * n, 0)); }

Topology Topology::complete(std::size_t n) {
  std::vector<std::uint8_t> adj(n * n, 1);
  for (std::size_t i = 0; i < n; ++i) adj[i * n + i] = 0;
  return Topology(n, std::move(adj));
}

std::size_t Topology::edge_count() const {
  return static_cast<std::size_t>(std::count(adj_.begin(), adj_.end(), std::uint8_t{1}));
}

WeightMatrix::WeightMatrix(Matrix w) : w_(std::move(w)) {
  if (w_.rows() != w_.cols()) throw ValidationError("weight matrix must be square");
  for (std::size_t i = 0; i < w_.rows(); ++i) {
    for (std::size_t j = 0; j < w_.cols(); ++j) {
      const double v = w_(i, j);
      if (!(v >= 0.0 && v <= 1.0))
        throw ValidationError("weight (" + std::to_string(i) + "," + std::to_string(j) +
                              ") outside [0,1]");
      if (i == j && v != 0.0) throw ValidationError("weight matrix diagonal must be zero");
    }
  }
}

NodeMask::NodeMask(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (auto b : bits_)
    if (b > 1) throw ValidationError("node mask entry not in {0,1}");
}

NodeMask NodeMask::from_members(std::span<const AgentId> members, std::size_t n) {
  NodeMask m(n);
  for (AgentId id : members) {
    if (id >= n) throw InvalidMembers("member id " + std::to_string(id) + " >= " + std::to_string(n));
    m.bits_[id] = 1;
  }
  return m;
}

std::size_t NodeMask::active_count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::vector<AgentId> NodeMask::active_ids() const {
  std::vector<AgentId> ids;
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i]) ids.push_back(i);
  return ids;
}

std::string_view to_string(Category c) {
  switch (c) {
    case Category::kGeneralReasoning: return "general_reasoning";
    case Category::kMathReasoning: return "math_reasoning";
    case Category::kCodeGeneration: return "code_generation";
  }
  return "general_reasoning";
}

Category parse_category(std::string_view s) {
  if (s == "general_reasoning") return Category::kGeneralReasoning;
  if (s == "math_reasoning") return Category::kMathReasoning;
  if (s == "code_generation") return Category::kCodeGeneration;
  throw FormatError("unknown category '" + std::string(s) + "'");
}

void validate(const SupervisionPair& pair) {
  const std::size_t n = pair.y.n();
  if (pair.a_gt.n() != n)
    throw ValidationError("pair " + pair.task_id + ": a_gt is " + std::to_string(pair.a_gt.n()) +
                          "x" + std::to_string(pair.a_gt.n()) + " but mask has " +
                          std::to_string(n) + " entries");
  if (pair.y.active_count() < 2)
    throw ValidationError("pair " + pair.task_id + ": fewer than two active nodes");
  if (!(pair.score >= 0.0 && pair.score <= 1.0))
    throw ValidationError("pair " + pair.task_id + ": score outside [0,1]");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if ((!pair.y[i] || !pair.y[j]) && pair.a_gt(i, j) != 0.0)
        throw ValidationError("pair " + pair.task_id + ": edge (" + std::to_string(i) + "," +
                              std::to_string(j) + ") touches a masked node");
}

CommTopology::CommTopology(NodeMask mask, WeightMatrix weights)
    : mask_(std::move(mask)), weights_(std::move(weights)) {
  if (mask_.n() != weights_.n())
    throw DimensionError("topology mask has " + std::to_string(mask_.n()) +
                         " nodes, weights have " + std::to_string(weights_.n()));
  for (std::size_t i = 0; i < mask_.n(); ++i)
    for (std::size_t j = 0; j < mask_.n(); ++j)
      if ((!mask_[i] || !mask_[j]) && weights_(i, j) != 0.0)
        throw ValidationError("topology weight (" + std::to_string(i) + "," +
                              std::to_string(j) + ") touches a masked node");
}

std::pair<WeightMatrix, NodeMask> lift_subgraph(const Topology& sub,
                                                std::span<const AgentId> members,
                                                std::size_t n_max) {
  if (members.size() != sub.n())
    throw InvalidMembers("member count " + std::to_string(members.size()) +
                         " differs from subgraph order " + std::to_string(sub.n()));
  for (std::size_t k = 0; k < members.size(); ++k) {
    if (members[k] >= n_max)
      throw InvalidMembers("member id " + std::to_string(members[k]) + " out of range");
    if (k > 0 && members[k] <= members[k - 1])
      throw InvalidMembers("members must be strictly ascending");
  }
  Matrix w(n_max, n_max);
  for (std::size_t a = 0; a < sub.n(); ++a)
    for (std::size_t b = 0; b < sub.n(); ++b)
      if (sub.edge(a, b)) w(members[a], members[b]) = 1.0;
  return {WeightMatrix(std::move(w)), NodeMask::from_members(members, n_max)};
}

Topology restrict_to(const WeightMatrix& lifted, std::span<const AgentId> members) {
  const std::size_t m = members.size();
  std::vector<std::uint8_t> adj(m * m, 0);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b)
      if (a != b && lifted(members[a], members[b]) >= 0.5) adj[a * m + b] = 1;
  return Topology(m, std::move(adj));
}

CommTopology induce(const WeightMatrix& weights, const NodeMask& mask) {
  if (weights.n() != mask.n())
    throw DimensionError("induce: weights are " + std::to_string(weights.n()) + " nodes, mask " +
                         std::to_string(mask.n()));
  if (mask.active_count() < 2)
    throw DegenerateTopology("induce: " + std::to_string(mask.active_count()) +
                             " active node(s), need at least 2");
  Matrix w = weights.matrix();
  for (std::size_t i = 0; i < mask.n(); ++i) {
    if (mask[i]) continue;
    for (std::size_t j = 0; j < mask.n(); ++j) {
      w(i, j) = 0.0;
      w(j, i) = 0.0;
    }
  }
  return CommTopology(mask, WeightMatrix(std::move(w)));
}

Topology binarize(const WeightMatrix& weights, double theta) {
  const std::size_t n = weights.n();
  std::vector<std::uint8_t> adj(n * n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && weights(i, j) >= theta) adj[i * n + j] = 1;
  return Topology(n, std::move(adj));
}

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

std::string to_dot(const CommTopology& t, std::span<const std::string> labels) {
  if (!labels.empty() && labels.size() != t.n())
    throw DimensionError("dot export: " + std::to_string(labels.size()) + " labels for " +
                         std::to_string(t.n()) + " nodes");
  std::ostringstream out;
  out << "digraph G {\n";
  for (AgentId i : t.mask().active_ids()) {
    out << "  " << i;
    if (!labels.empty()) out << " [label=\"" << dot_escape(labels[i]) << "\"]";
    out << ";\n";
  }
  char buf[32];
  for (std::size_t i = 0; i < t.n(); ++i) {
    for (std::size_t j = 0; j < t.n(); ++j) {
      const double w = t.weights()(i, j);
      if (i == j || w < 0.5) continue;
      std::snprintf(buf, sizeof buf, "%.3f", w);
      out << "  " << i << " -> " << j << " [label=\"" << buf << "\"];\n";
    }
  }
  out << "}\n";
  return out.str();
}

}  // namespace

std::string serialize_topology(const CommTopology& t, TopologyFormat format,
                               std::span<const std::string> labels) {
  if (format == TopologyFormat::kDot) return to_dot(t, labels);
  detail::json j;
  j["n_max"] = t.n();
  j["mask"] = t.mask().bits();
  j["weights"] = detail::matrix_to_json(t.weights().matrix());
  return j.dump();
}

CommTopology parse_topology(std::string_view text) {
  const auto j = detail::parse_json(text, "topology");
  if (!j.is_object() || !j.contains("n_max") || !j.contains("mask") || !j.contains("weights"))
    throw FormatError("topology: expected object with n_max, mask, weights");
  if (!j["n_max"].is_number_unsigned()) throw FormatError("topology: n_max must be a count");
  const auto n = j["n_max"].get<std::size_t>();
  NodeMask mask(detail::bits_from_json(j["mask"], "topology mask"));
  WeightMatrix w(detail::matrix_from_json(j["weights"], "topology weights"));
  if (mask.n() != n || w.n() != n)
    throw ValidationError("topology: n_max disagrees with mask/weights size");
  return CommTopology(std::move(mask), std::move(w));
}

}  // namespace agp
