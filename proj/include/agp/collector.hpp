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

// Supervision mining: sample complete subgraphs of the anchored pool, score
// each one on a task, keep the best few per task and lift them into the
// n_max frame as training labels.

#ifndef AGP_COLLECTOR_HPP_
#define AGP_COLLECTOR_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "agp/agent_pool.hpp"
#include "agp/graph.hpp"
#include "agp/orchestrator.hpp"
#include "agp/random.hpp"
#include "agp/task.hpp"

namespace agp {

struct CollectorConfig {
  std::size_t budget = 2000;  // sampled graphs per task
  double sigma = 2.0;
  std::optional<double> mu;  // defaults to n_max / 2
  std::size_t top_k = 2;
  std::uint64_t seed = 0;
  std::size_t parallelism = 1;

  double mean(std::size_t n_max) const { return mu.value_or(static_cast<double>(n_max) / 2.0); }
  /// Throws ConfigError.
  void validate(std::size_t n_max) const;
};

/// Complete subgraph K_i on ascending member ids.
struct SampledGraph {
  std::vector<AgentId> members;
  Topology topology;
};

struct ScoredGraph {
  SampledGraph graph;
  double utility = 0.0;
};

/// B graph orders from N(mu, sigma^2), redrawn until inside [2, n_max],
/// then rounded half-up.
std::vector<std::size_t> sample_orders(const CollectorConfig& cfg, std::size_t n_max, Rng& rng);
std::vector<std::size_t> sample_orders(const CollectorConfig& cfg, std::size_t n_max);

/// Uniform size-`order` subset, ascending. Throws InvalidOrder.
SampledGraph sample_subset(std::size_t order, std::size_t n_max, Rng& rng);

/// Utility of a member set on one task instance, in [0,1].
/// Throws ScoreUnavailable when the evaluation cannot be performed.
class Evaluator {
 public:
  virtual ~Evaluator() = default;
  virtual double evaluate(std::span<const AgentId> members, const TaskSpec& task) = 0;
  virtual bool thread_safe() const { return true; }
};

class FunctionEvaluator : public Evaluator {
 public:
  using Fn = std::function<double(std::span<const AgentId>, const TaskSpec&)>;
  explicit FunctionEvaluator(Fn fn) : fn_(std::move(fn)) {}
  double evaluate(std::span<const AgentId> members, const TaskSpec& task) override {
    return fn_(members, task);
  }

 private:
  Fn fn_;
};

/// Runs the complete subgraph through the orchestrator and checks the answer.
class OrchestratorEvaluator : public Evaluator {
 public:
  OrchestratorEvaluator(const AgentPool& pool, BackendSet backends, RunOptions options)
      : pool_(pool), backends_(std::move(backends)), options_(options) {}
  double evaluate(std::span<const AgentId> members, const TaskSpec& task) override;
  bool thread_safe() const override { return false; }

 private:
  const AgentPool& pool_;
  BackendSet backends_;
  RunOptions options_;
};

/// Mean utility over the task instances (fraction answered correctly).
double score_graph(const SampledGraph& g, std::span<const TaskSpec> instances, Evaluator& evaluator);

/// All scored graphs for one task.
struct TaskScores {
  TaskSpec task;
  std::vector<ScoredGraph> graphs;
};

/// Best `top_k` distinct member sets per task (utility desc, then fewer
/// members, then lexicographic ids), lifted to n_max. Throws MineUnderflow.
std::vector<SupervisionPair> mine_supervision(std::span<const TaskScores> scored,
                                              const CollectorConfig& cfg, std::size_t n_max);

struct CollectionSummary {
  std::size_t tasks = 0;
  std::size_t graphs_sampled = 0;
  std::size_t graphs_scored = 0;  // distinct (member set, task) evaluations
  std::size_t graphs_skipped = 0;
  std::map<Category, std::size_t> pairs_per_category;
};

struct CollectionResult {
  std::vector<SupervisionPair> pairs;
  CollectionSummary summary;
};

/// Full mining run. Each task draws its own pool of cfg.budget graphs from a
/// stream seeded by (cfg.seed, task_id); duplicates are scored once.
CollectionResult collect(std::span<const TaskSpec> tasks, std::size_t n_max, Evaluator& evaluator,
                         const CollectorConfig& cfg,
                         const std::function<void(const std::string&)>& log = {});

/// Corpus JSONL: {"task_id","task_text","category","score","y","a_gt"}.
std::string dump_corpus(std::span<const SupervisionPair> pairs);
/// Parses and validates every pair. Throws FormatError / ValidationError.
std::vector<SupervisionPair> parse_corpus(std::string_view jsonl);
std::vector<SupervisionPair> load_corpus_file(const std::string& path);

}  // namespace agp

#endif  // AGP_COLLECTOR_HPP_
