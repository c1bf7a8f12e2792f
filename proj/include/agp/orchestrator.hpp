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

// Multi-round execution of a communication topology. Active agents speak
// in ascending id order for K rounds; each sees only messages from its
// in-neighbours (edges with weight >= theta), strongest edge first. A
// decision agent outside the graph then reads the whole transcript and
// produces the final answer.

#ifndef AGP_ORCHESTRATOR_HPP_
#define AGP_ORCHESTRATOR_HPP_

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "agp/agent_pool.hpp"
#include "agp/errors.hpp"
#include "agp/graph.hpp"
#include "agp/random.hpp"
#include "agp/task.hpp"

namespace agp {

/// agent_id used for the decision agent's transcript entry.
inline constexpr long kDecisionAgentId = -1;

struct DialogueEntry {
  std::string entry_id;
  int round = 1;
  long agent_id = 0;
  std::string role;
  std::string output;
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;

  friend bool operator==(const DialogueEntry&, const DialogueEntry&) = default;
};

struct ChatRequest {
  std::string system_prompt;
  std::string user_prompt;
  std::string model;
  // Metadata for offline backends; never sent over the wire.
  long agent_id = 0;
  std::string task;
};

struct Completion {
  std::string text;
  // Native usage, when the backend reports it.
  std::optional<std::int64_t> prompt_tokens;
  std::optional<std::int64_t> completion_tokens;
};

/// Language backbone of an agent. Throws BackendError on failure.
class AgentBackend {
 public:
  virtual ~AgentBackend() = default;
  virtual Completion complete(const ChatRequest& request) = 0;
};

/// Which backend serves which agent.
struct BackendSet {
  std::shared_ptr<AgentBackend> fallback;
  std::map<AgentId, std::shared_ptr<AgentBackend>> per_agent;
  std::shared_ptr<AgentBackend> decision;

  AgentBackend* for_agent(AgentId id) const;
};

/// Never-pruned aggregator profile.
const AgentProfile& decision_profile();

struct RunOptions {
  int k = 3;
  double theta = 0.5;
  std::uint64_t seed = 0;  // drives the dialogue entry ids
};

struct RunResult {
  std::string answer;
  std::vector<DialogueEntry> transcript;
  std::int64_t total_tokens = 0;
  std::map<AgentId, std::int64_t> per_agent_tokens;
  std::int64_t decision_tokens = 0;
  CommTopology topology_used;
};

/// Thrown when a backend keeps failing; carries the transcript so far.
class RunAborted : public Error {
 public:
  RunAborted(const std::string& what, RunResult partial)
      : Error(what), partial_(std::move(partial)) {}
  const RunResult& partial() const { return partial_; }

 private:
  RunResult partial_;
};

/// Whitespace-delimited token count.
std::int64_t count_tokens(std::string_view text);

/// Entries authored by in-neighbours of `agent` under `adj`, ordered by
/// incoming weight (descending), then arrival.
std::vector<DialogueEntry> visible_history(std::span<const DialogueEntry> history, AgentId agent,
                                           const Topology& adj, const WeightMatrix& weights);

std::vector<HistoryItem> to_history_items(std::span<const DialogueEntry> entries);

/// Prompts the decision agent with the task and the full transcript; returns
/// its output verbatim along with the entry it produced. Throws
/// PreconditionError on an empty transcript and BackendError on failure.
DialogueEntry decision_aggregate(std::span<const DialogueEntry> transcript, std::string_view task,
                                 AgentBackend& decision_backend, int round, Rng& rng);

/// Executes `t`. Throws DegenerateTopology / PreconditionError / RunAborted.
RunResult run_topology(const CommTopology& t, const TaskSpec& task, const AgentPool& pool,
                       const BackendSet& backends, const RunOptions& options = {});

/// JSON export (stable key order; byte-identical for identical runs).
std::string run_result_json(const RunResult& r);

/// Transcript in the dialogue-history format plus round/token fields.
std::string transcript_json(std::span<const DialogueEntry> transcript);

// ---------------------------------------------------------------------------
// Backends

/// Deterministic offline backend: acknowledges how many responses it saw.
class EchoBackend : public AgentBackend {
 public:
  Completion complete(const ChatRequest& request) override;
};

/// Decision mock: most frequent output in the transcript (ties -> earliest).
class MajorityVoteBackend : public AgentBackend {
 public:
  Completion complete(const ChatRequest& request) override;
};

/// Chat-completions client: POST {"model","messages","temperature"}.
/// Retries `attempts` times with exponential backoff from `base_delay`.
class HttpChatBackend : public AgentBackend {
 public:
  struct Options {
    std::string endpoint;
    std::string api_key;
    std::string model;
    double temperature = 1.0;
    int attempts = 3;
    std::chrono::milliseconds base_delay{1000};
    std::chrono::milliseconds timeout{60000};
  };
  explicit HttpChatBackend(Options options);
  Completion complete(const ChatRequest& request) override;

  /// Request body for `request` (exposed for wire-format tests).
  std::string request_body(const ChatRequest& request) const;

 private:
  Options options_;
};

}  // namespace agp

#endif  // AGP_ORCHESTRATOR_HPP_
