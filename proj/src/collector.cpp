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

#include "agp/collector.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "agp/errors.hpp"
#include "json_util.hpp"
#include "parallel.hpp"

namespace agp {

void CollectorConfig::validate(std::size_t n_max) const {
  if (n_max < 2) throw ConfigError("collector needs a pool of at least 2 agents");
  if (budget < 1) throw ConfigError("collector budget must be >= 1");
  if (!(sigma > 0.0)) throw ConfigError("collector sigma must be > 0");
  const double m = mean(n_max);
  if (!(m >= 2.0 && m <= static_cast<double>(n_max)))
    throw ConfigError("collector mu must lie in [2, n_max]");
  if (top_k < 1) throw ConfigError("collector top_k must be >= 1");
}

std::vector<std::size_t> sample_orders(const CollectorConfig& cfg, std::size_t n_max, Rng& rng) {
  cfg.validate(n_max);
  std::normal_distribution<double> gauss(cfg.mean(n_max), cfg.sigma);
  const double hi = static_cast<double>(n_max);
  std::vector<std::size_t> orders;
  orders.reserve(cfg.budget);
  while (orders.size() < cfg.budget) {
    const double x = gauss(rng);
    if (x < 2.0 || x > hi) continue;
    orders.push_back(std::min(n_max, static_cast<std::size_t>(std::floor(x + 0.5))));
  }
  return orders;
}

std::vector<std::size_t> sample_orders(const CollectorConfig& cfg, std::size_t n_max) {
  Rng rng(cfg.seed);
  return sample_orders(cfg, n_max, rng);
}

SampledGraph sample_subset(std::size_t order, std::size_t n_max, Rng& rng) {
  if (order < 2 || order > n_max)
    throw InvalidOrder("graph order " + std::to_string(order) + " outside [2, " +
                       std::to_string(n_max) + "]");
  std::vector<AgentId> ids(n_max);
  std::iota(ids.begin(), ids.end(), AgentId{0});
  // Partial Fisher-Yates: the first `order` slots are a uniform subset.
  for (std::size_t i = 0; i < order; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n_max - 1);
    std::swap(ids[i], ids[pick(rng)]);
  }
  ids.resize(order);
  std::sort(ids.begin(), ids.end());
  return {std::move(ids), Topology::complete(order)};
}

double OrchestratorEvaluator::evaluate(std::span<const AgentId> members, const TaskSpec& task) {
  try {
    auto [weights, mask] = lift_subgraph(Topology::complete(members.size()), members, pool_.n_max());
    const auto result = run_topology(CommTopology(mask, weights), task, pool_, backends_, options_);
    return check_answer(task, result.answer) ? 1.0 : 0.0;
  } catch (const RunAborted& e) {
    throw ScoreUnavailable(e.what());
  } catch (const BackendError& e) {
    throw ScoreUnavailable(e.what());
  }
}

double score_graph(const SampledGraph& g, std::span<const TaskSpec> instances,
                   Evaluator& evaluator) {
  if (instances.empty()) throw ScoreUnavailable("no task instances to score");
  double total = 0.0;
  for (const auto& t : instances) {
    const double u = evaluator.evaluate(g.members, t);
    if (!(u >= 0.0 && u <= 1.0))
      throw ScoreUnavailable("evaluator returned utility outside [0,1] for " + t.task_id);
    total += u;
  }
  return total / static_cast<double>(instances.size());
}

std::vector<SupervisionPair> mine_supervision(std::span<const TaskScores> scored,
                                              const CollectorConfig& cfg, std::size_t n_max) {
  std::vector<SupervisionPair> pairs;
  for (const auto& ts : scored) {
    std::vector<const ScoredGraph*> ranked;
    for (const auto& g : ts.graphs) ranked.push_back(&g);
    std::sort(ranked.begin(), ranked.end(), [](const ScoredGraph* a, const ScoredGraph* b) {
      if (a->utility != b->utility) return a->utility > b->utility;
      if (a->graph.members.size() != b->graph.members.size())
        return a->graph.members.size() < b->graph.members.size();
      return a->graph.members < b->graph.members;
    });
    ranked.erase(std::unique(ranked.begin(), ranked.end(),
                             [](const ScoredGraph* a, const ScoredGraph* b) {
                               return a->graph.members == b->graph.members;
                             }),
                 ranked.end());
    if (ranked.size() < cfg.top_k)
      throw MineUnderflow("task " + ts.task.task_id + " has " + std::to_string(ranked.size()) +
                          " distinct scored graph(s), need " + std::to_string(cfg.top_k));
    for (std::size_t r = 0; r < cfg.top_k; ++r) {
      const ScoredGraph& g = *ranked[r];
      auto [a_gt, y] = lift_subgraph(g.graph.topology, g.graph.members, n_max);
      SupervisionPair p{ts.task.task_id, ts.task.task_text, ts.task.category,
                        std::move(a_gt),  std::move(y),      g.utility};
      validate(p);
      pairs.push_back(std::move(p));
    }
  }
  return pairs;
}

CollectionResult collect(std::span<const TaskSpec> tasks, std::size_t n_max, Evaluator& evaluator,
                         const CollectorConfig& cfg,
                         const std::function<void(const std::string&)>& log) {
  cfg.validate(n_max);
  CollectionResult result;
  result.summary.tasks = tasks.size();
  std::vector<TaskScores> scored;
  scored.reserve(tasks.size());
  const std::size_t threads = evaluator.thread_safe() ? cfg.parallelism : 1;

  for (const auto& task : tasks) {
    Rng rng(derive_seed(cfg.seed, task.task_id));
    std::vector<SampledGraph> distinct;
    for (std::size_t order : sample_orders(cfg, n_max, rng)) {
      SampledGraph g = sample_subset(order, n_max, rng);
      ++result.summary.graphs_sampled;
      const bool seen = std::any_of(distinct.begin(), distinct.end(), [&](const SampledGraph& d) {
        return d.members == g.members;
      });
      if (!seen) distinct.push_back(std::move(g));
    }

    std::vector<std::optional<double>> utilities(distinct.size());
    std::vector<std::string> failures(distinct.size());
    const TaskSpec instance[] = {task};
    detail::parallel_for(distinct.size(), threads, [&](std::size_t i) {
      try {
        utilities[i] = score_graph(distinct[i], instance, evaluator);
      } catch (const ScoreUnavailable& e) {
        failures[i] = e.what();
      }
    });

    TaskScores ts{task, {}};
    std::string last_failure;
    for (std::size_t i = 0; i < distinct.size(); ++i) {
      if (!utilities[i]) {
        ++result.summary.graphs_skipped;
        last_failure = failures[i];
        if (log) log("skipped graph for task " + task.task_id + ": " + failures[i]);
        continue;
      }
      ++result.summary.graphs_scored;
      ts.graphs.push_back({std::move(distinct[i]), *utilities[i]});
    }
    // Too few graphs because scoring failed is an evaluator outage, not a
    // sampling shortfall.
    if (ts.graphs.size() < cfg.top_k && !last_failure.empty())
      throw ScoreUnavailable("task " + task.task_id + ": only " + std::to_string(ts.graphs.size()) +
                             " graph(s) could be scored; last error: " + last_failure);
    scored.push_back(std::move(ts));
  }

  result.pairs = mine_supervision(scored, cfg, n_max);
  for (const auto& p : result.pairs) ++result.summary.pairs_per_category[p.category];
  return result;
}

std::string dump_corpus(std::span<const SupervisionPair> pairs) {
  std::string out;
  for (const auto& p : pairs) {
    nlohmann::ordered_json j;
    j["task_id"] = p.task_id;
    j["task_text"] = p.task_text;
    j["category"] = std::string(to_string(p.category));
    j["score"] = p.score;
    j["y"] = p.y.bits();
    j["a_gt"] = detail::matrix_to_json(p.a_gt.matrix());
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<SupervisionPair> parse_corpus(std::string_view jsonl) {
  std::vector<SupervisionPair> pairs;
  detail::for_each_line(jsonl, [&](std::string_view line, std::size_t line_no) {
    const auto j = detail::parse_json(line, "corpus");
    SupervisionPair p;
    try {
      p.task_id = j.at("task_id").get<std::string>();
      p.task_text = j.at("task_text").get<std::string>();
      p.category = parse_category(j.at("category").get<std::string>());
      p.score = j.at("score").get<double>();
      p.y = NodeMask(detail::bits_from_json(j.at("y"), "corpus y"));
      p.a_gt = WeightMatrix(detail::matrix_from_json(j.at("a_gt"), "corpus a_gt"));
    } catch (const detail::json::exception& e) {
      throw FormatError("corpus line " + std::to_string(line_no) + ": " + e.what());
    }
    validate(p);
    pairs.push_back(std::move(p));
  });
  return pairs;
}

std::vector<SupervisionPair> load_corpus_file(const std::string& path) {
  return parse_corpus(detail::read_file(path));
}

}  // namespace agp
