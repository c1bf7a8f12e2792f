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

// Planted task suite. Three task families, one per category, each with a
// fixed three-agent team that is the only group able to solve it. Every
// team member knows one fragment of the answer; the decision agent joins
// the fragments it finds in the transcript.

#ifndef AGP_SYNTHETIC_HPP_
#define AGP_SYNTHETIC_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "agp/collector.hpp"
#include "agp/graph.hpp"
#include "agp/orchestrator.hpp"
#include "agp/task.hpp"

namespace agp {

inline constexpr std::size_t kPlantedFamilies = 3;
inline constexpr std::size_t kPlantedTeamSize = 3;

struct PlantedFamily {
  std::string_view name;
  Category category;
  std::array<AgentId, kPlantedTeamSize> team;  // ascending
  std::span<const std::string_view> vocabulary;
};

const std::array<PlantedFamily, kPlantedFamilies>& planted_families();

/// Family whose vocabulary matches the text best (ties -> lowest index).
std::size_t classify_family(std::string_view text);

/// Node mask of the family's team in an n_max frame.
NodeMask planted_mask(std::size_t family, std::size_t n_max);

/// Answer fragment `k` of a task text: four lowercase alphanumerics.
std::string planted_fragment(std::string_view task_text, std::size_t k);
std::string planted_answer(std::string_view task_text);

/// counts[f] tasks of family f, ids "<prefix>-<family>-<index>".
std::vector<TaskSpec> generate_planted_tasks(const std::array<std::size_t, kPlantedFamilies>& counts,
                                             std::uint64_t seed, std::string_view id_prefix = "p");

/// Splits `total` in the 200:100:160 category ratio (largest remainder).
std::array<std::size_t, kPlantedFamilies> planted_ratio_counts(std::size_t total);

/// 1 when members contain the family team, else overlap / team size.
class PlantedEvaluator : public Evaluator {
 public:
  double evaluate(std::span<const AgentId> members, const TaskSpec& task) override;
};

/// Team member k of the task's family states fragment k; others abstain.
class PlantedAgentBackend : public AgentBackend {
 public:
  Completion complete(const ChatRequest& request) override;
};

/// Joins fragments 0..2 found in the prompt with '-', or "unknown".
class PlantedDecisionBackend : public AgentBackend {
 public:
  Completion complete(const ChatRequest& request) override;
};

BackendSet planted_backends();

}  // namespace agp

#endif  // AGP_SYNTHETIC_HPP_
