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

#ifndef AGP_AGENT_POOL_HPP_
#define AGP_AGENT_POOL_HPP_

#include <cstddef>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "agp/graph.hpp"

namespace agp {

inline constexpr std::string_view kProfileSlot = "<Profile>";
inline constexpr std::string_view kTaskSlot = "<Task>";
inline constexpr std::string_view kDefaultSystemTemplate =
    "<Profile>. And your task is to solve the question: <Task>. ";
inline constexpr std::string_view kUserPromptPrefix =
    "At the same time, there are the following responses to the same question for your "
    "reference: ";

/// One member of the agent pool. Immutable configuration; per-run dialogue
/// state lives in the orchestrator.
struct AgentProfile {
  AgentId id = 0;
  std::string role;
  std::string expertise;
  std::string backbone;            // model tag of the language backbone
  std::vector<std::string> tools;  // metadata only, never invoked
  std::string system_template{kDefaultSystemTemplate};

  friend bool operator==(const AgentProfile&, const AgentProfile&) = default;
};

/// The anchored roster: agent at position k always has id k.
class AgentPool {
 public:
  AgentPool() = default;
  /// Sorts by id and enforces ids 0..n-1. Throws AnchoringError.
  explicit AgentPool(std::vector<AgentProfile> agents);

  std::size_t n_max() const { return agents_.size(); }
  const AgentProfile& operator[](AgentId id) const { return agents_.at(id); }
  const std::vector<AgentProfile>& agents() const { return agents_; }

  /// Index of the first agent with this role, or n_max() when absent.
  AgentId find_role(std::string_view role) const;

 private:
  std::vector<AgentProfile> agents_;
};

/// Parses the JSONL profile format (keys id, role, expertise, backbone,
/// tools, system_template). Throws FormatError / AnchoringError.
AgentPool load_pool(std::string_view source);
AgentPool load_pool_file(const std::string& path);

/// Serializes a pool back to JSONL, one profile per line.
std::string dump_pool(const AgentPool& pool);

/// The 15-role heterogeneous roster shipped with the project.
const AgentPool& default_pool();

/// Natural-language description that fills the <Profile> slot.
std::string profile_text(const AgentProfile& p);

/// Non-fatal issues with a profile (e.g. empty description).
std::vector<std::string> profile_warnings(const AgentProfile& p);

/// Fills the <Profile> and <Task> slots of `tmpl` in a single left-to-right
/// pass; slot markers inside the substituted text are left alone.
std::string fill_template(std::string_view tmpl, std::string_view profile, std::string_view task);

/// System prompt of `p` for `task`.
std::string render_system_prompt(const AgentProfile& p, std::string_view task);

/// One entry of the dialogue history shown to an agent.
struct HistoryItem {
  std::string id;
  std::string role;
  std::string output;
};

/// Serializes history as a JSON array of {"id","role","output"} objects,
/// preserving order.
std::string history_json(std::span<const HistoryItem> history);

/// kUserPromptPrefix followed by history_json(history).
std::string render_user_prompt(std::span<const HistoryItem> history);

/// Parses the array produced by history_json. Throws FormatError.
std::vector<HistoryItem> parse_history_json(std::string_view json);

/// Random 4-character [A-Z0-9] tag for a dialogue entry.
std::string make_entry_id(std::mt19937_64& rng);

}  // namespace agp

#endif  // AGP_AGENT_POOL_HPP_
