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

// Static baseline topologies, the benchmark harness and the node-count
// Gaussian fit.

#ifndef AGP_BENCH_HPP_
#define AGP_BENCH_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "agp/agent_pool.hpp"
#include "agp/graph.hpp"
#include "agp/orchestrator.hpp"
#include "agp/random.hpp"
#include "agp/task.hpp"

namespace agp {

enum class StaticShape { kChain, kStar, kTree, kComplete, kRandom };

std::string_view to_string(StaticShape s);
/// Throws ConfigError on an unknown name.
StaticShape parse_static_shape(std::string_view s);

struct StaticOptions {
  double p = 0.3;              // edge probability of the random shape
  bool bidirectional_tree = false;
};

/// Baseline topology over `members` (sorted ids) in an n_max frame, unit
/// weights on every included edge. Throws ConfigError.
CommTopology make_static(StaticShape shape, std::span<const AgentId> members, std::size_t n_max,
                         Rng& rng, const StaticOptions& options = {});

/// A named source of topologies; called once per task and repeat.
struct BenchMethod {
  std::string name;
  std::function<CommTopology(const TaskSpec&, Rng&)> topology;
};

struct BenchOptions {
  std::size_t repeats = 2;
  RunOptions run;
  std::uint64_t seed = 0;
  std::size_t parallelism = 1;
};

struct BenchRow {
  std::string method;
  double accuracy = 0.0;
  double mean_tokens = 0.0;
  std::size_t runs = 0;
  std::size_t aborted = 0;
  std::int64_t total_tokens = 0;
  std::map<Category, double> category_accuracy;
};

struct BenchReport {
  std::string suite;
  std::uint64_t seed = 0;
  std::vector<BenchRow> rows;

  const BenchRow* find(std::string_view method) const;
};

/// Runs every method on every task `repeats` times. Aborted runs count as
/// incorrect with their partial tokens. Throws ConfigError on an empty suite.
BenchReport run_bench(std::span<const TaskSpec> suite, std::span<const BenchMethod> methods,
                      const AgentPool& pool, const BackendSet& backends,
                      const BenchOptions& options = {}, std::string_view suite_name = "suite",
                      const std::function<void(const std::string&)>& log = {});

/// method,accuracy,mean_tokens,runs,aborted,<category>...
std::string bench_csv(const BenchReport& report);
std::string bench_markdown(const BenchReport& report);

struct GaussianFit {
  double a = 0.0;
  double mu = 0.0;
  double sigma = 0.0;
};

/// Least-squares fit of a * exp(-(x - mu)^2 / (2 sigma^2)) to the histogram
/// of active-node counts. Throws FitDegenerate / PreconditionError.
GaussianFit fit_node_count_gaussian(std::span<const CommTopology> topologies);
GaussianFit fit_node_count_gaussian(std::span<const std::size_t> node_counts);

}  // namespace agp

#endif  // AGP_BENCH_HPP_
