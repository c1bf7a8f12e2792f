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

#include "agp/orchestrator.hpp"

#include <algorithm>
#include <cctype>
#include <thread>

#include "agp/errors.hpp"
#include "http_util.hpp"
#include "json_util.hpp"

namespace agp {

namespace {

using ordered_json = nlohmann::ordered_json;

std::vector<HistoryItem> history_from_user_prompt(std::string_view user_prompt) {
  const auto start = user_prompt.find('[');
  if (start == std::string_view::npos) return {};
  return parse_history_json(user_prompt.substr(start));
}

DialogueEntry make_entry(const ChatRequest& req, const Completion& c, int round, long agent_id,
                         const std::string& role, Rng& rng) {
  DialogueEntry e;
  e.entry_id = make_entry_id(rng);
  e.round = round;
  e.agent_id = agent_id;
  e.role = role;
  e.output = c.text;
  e.prompt_tokens =
      c.prompt_tokens.value_or(count_tokens(req.system_prompt) + count_tokens(req.user_prompt));
  e.completion_tokens = c.completion_tokens.value_or(count_tokens(c.text));
  return e;
}

std::int64_t entry_tokens(const DialogueEntry& e) { return e.prompt_tokens + e.completion_tokens; }

void finalize_totals(RunResult& r) {
  r.total_tokens = r.decision_tokens;
  for (const auto& [id, tokens] : r.per_agent_tokens) r.total_tokens += tokens;
}

ordered_json entry_json(const DialogueEntry& e) {
  ordered_json j;
  j["id"] = e.entry_id;
  j["role"] = e.role;
  j["output"] = e.output;
  j["round"] = e.round;
  j["agent_id"] = e.agent_id;
  j["prompt_tokens"] = e.prompt_tokens;
  j["completion_tokens"] = e.completion_tokens;
  return j;
}

}  // namespace

AgentBackend* BackendSet::for_agent(AgentId id) const {
  if (auto it = per_agent.find(id); it != per_agent.end() && it->second) return it->second.get();
  return fallback.get();
}

const AgentProfile& decision_profile() {
  static const AgentProfile p = [] {
    AgentProfile d;
    d.id = 0;
    d.role = "Decision Maker";
    d.expertise =
        "Aggregate the dialogue history and state the single final answer to the question";
    d.backbone = "gpt-4o-mini";
    return d;
  }();
  return p;
}

std::int64_t count_tokens(std::string_view text) {
  std::int64_t n = 0;
  bool in_token = false;
  for (char ch : text) {
    const bool space = std::isspace(static_cast<unsigned char>(ch)) != 0;
    if (!space && !in_token) ++n;
    in_token = !space;
  }
  return n;
}

std::vector<DialogueEntry> visible_history(std::span<const DialogueEntry> history, AgentId agent,
                                           const Topology& adj, const WeightMatrix& weights) {
  std::vector<DialogueEntry> out;
  for (const auto& e : history) {
    if (e.agent_id < 0) continue;
    const auto author = static_cast<AgentId>(e.agent_id);
    if (author >= adj.n() || author == agent) continue;
    if (adj.edge(author, agent)) out.push_back(e);
  }
  std::stable_sort(out.begin(), out.end(), [&](const DialogueEntry& a, const DialogueEntry& b) {
    return weights(static_cast<AgentId>(a.agent_id), agent) >
           weights(static_cast<AgentId>(b.agent_id), agent);
  });
  return out;
}

std::vector<HistoryItem> to_history_items(std::span<const DialogueEntry> entries) {
  std::vector<HistoryItem> items;
  items.reserve(entries.size());
  for (const auto& e : entries) items.push_back({e.entry_id, e.role, e.output});
  return items;
}

DialogueEntry decision_aggregate(std::span<const DialogueEntry> transcript, std::string_view task,
                                 AgentBackend& decision_backend, int round, Rng& rng) {
  if (transcript.empty()) throw PreconditionError("decision agent needs a nonempty transcript");
  const AgentProfile& d = decision_profile();
  ChatRequest req;
  req.system_prompt = render_system_prompt(d, task);
  req.user_prompt = render_user_prompt(to_history_items(transcript));
  req.model = d.backbone;
  req.agent_id = kDecisionAgentId;
  req.task = std::string(task);
  const Completion c = decision_backend.complete(req);
  return make_entry(req, c, round, kDecisionAgentId, d.role, rng);
}

RunResult run_topology(const CommTopology& t, const TaskSpec& task, const AgentPool& pool,
                       const BackendSet& backends, const RunOptions& options) {
  if (t.n() != pool.n_max())
    throw DimensionError("topology has " + std::to_string(t.n()) + " nodes, pool has " +
                         std::to_string(pool.n_max()));
  const std::vector<AgentId> active = t.mask().active_ids();
  if (active.size() < 2)
    throw DegenerateTopology("topology has " + std::to_string(active.size()) +
                             " active agent(s), need at least 2");
  if (options.k < 1) throw PreconditionError("k must be at least 1");
  for (AgentId id : active)
    if (!backends.for_agent(id))
      throw PreconditionError("no backend for agent " + std::to_string(id));
  if (!backends.decision) throw PreconditionError("no decision backend");

  Rng rng(options.seed);
  const Topology adj = binarize(t.weights(), options.theta);
  RunResult result;
  result.topology_used = t;
  for (AgentId id : active) result.per_agent_tokens[id] = 0;

  for (int round = 1; round <= options.k; ++round) {
    for (AgentId id : active) {
      const AgentProfile& profile = pool[id];
      const auto visible = visible_history(result.transcript, id, adj, t.weights());
      ChatRequest req;
      req.system_prompt = render_system_prompt(profile, task.task_text);
      req.user_prompt = render_user_prompt(to_history_items(visible));
      req.model = profile.backbone;
      req.agent_id = static_cast<long>(id);
      req.task = task.task_text;
      Completion c;
      try {
        c = backends.for_agent(id)->complete(req);
      } catch (const BackendError& e) {
        finalize_totals(result);
        throw RunAborted("agent " + std::to_string(id) + " failed in round " +
                             std::to_string(round) + ": " + e.what(),
                         std::move(result));
      }
      auto entry = make_entry(req, c, round, static_cast<long>(id), profile.role, rng);
      result.per_agent_tokens[id] += entry_tokens(entry);
      result.transcript.push_back(std::move(entry));
    }
  }

  try {
    auto decision =
        decision_aggregate(result.transcript, task.task_text, *backends.decision, options.k, rng);
    result.answer = decision.output;
    result.decision_tokens = entry_tokens(decision);
    result.transcript.push_back(std::move(decision));
  } catch (const BackendError& e) {
    finalize_totals(result);
    throw RunAborted(std::string("decision agent failed: ") + e.what(), std::move(result));
  }
  finalize_totals(result);
  return result;
}

std::string transcript_json(std::span<const DialogueEntry> transcript) {
  ordered_json arr = ordered_json::array();
  for (const auto& e : transcript) arr.push_back(entry_json(e));
  ordered_json j;
  j["Dialogue History"] = std::move(arr);
  return j.dump(2);
}

std::string run_result_json(const RunResult& r) {
  ordered_json j;
  j["answer"] = r.answer;
  j["total_tokens"] = r.total_tokens;
  j["decision_tokens"] = r.decision_tokens;
  ordered_json per_agent = ordered_json::object();
  for (const auto& [id, tokens] : r.per_agent_tokens) per_agent[std::to_string(id)] = tokens;
  j["per_agent_tokens"] = std::move(per_agent);
  ordered_json transcript = ordered_json::array();
  for (const auto& e : r.transcript) transcript.push_back(entry_json(e));
  j["transcript"] = std::move(transcript);
  j["topology"] = ordered_json::parse(serialize_topology(r.topology_used, TopologyFormat::kJson));
  return j.dump(2);
}

Completion EchoBackend::complete(const ChatRequest& request) {
  const auto seen = history_from_user_prompt(request.user_prompt).size();
  Completion c;
  c.text = "In my opinion, I think I have read " + std::to_string(seen) +
           " responses. And my answer to the task is echo.";
  return c;
}

Completion MajorityVoteBackend::complete(const ChatRequest& request) {
  const auto items = history_from_user_prompt(request.user_prompt);
  std::vector<std::pair<std::string, int>> counts;  // first-appearance order
  for (const auto& item : items) {
    auto it = std::find_if(counts.begin(), counts.end(),
                           [&](const auto& kv) { return kv.first == item.output; });
    if (it == counts.end())
      counts.emplace_back(item.output, 1);
    else
      ++it->second;
  }
  Completion c;
  int best = 0;
  for (const auto& [output, n] : counts) {
    if (n > best) {
      best = n;
      c.text = output;
    }
  }
  return c;
}

HttpChatBackend::HttpChatBackend(Options options) : options_(std::move(options)) {
  detail::split_url(options_.endpoint);
  if (options_.attempts < 1) throw ConfigError("chat backend needs at least one attempt");
}

std::string HttpChatBackend::request_body(const ChatRequest& request) const {
  ordered_json j;
  j["model"] = options_.model.empty() ? request.model : options_.model;
  j["messages"] = ordered_json::array(
      {ordered_json{{"role", "system"}, {"content", request.system_prompt}},
       ordered_json{{"role", "user"}, {"content", request.user_prompt}}});
  j["temperature"] = options_.temperature;
  return j.dump();
}

Completion HttpChatBackend::complete(const ChatRequest& request) {
  const std::string body = request_body(request);
  std::string last_error;
  auto delay = options_.base_delay;
  for (int attempt = 0; attempt < options_.attempts; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(delay);
      delay *= 2;
    }
    const auto reply = detail::post_json(options_.endpoint, body, options_.api_key, options_.timeout);
    if (!reply) {
      last_error = "endpoint unreachable";
      continue;
    }
    if (reply->status != 200) {
      last_error = "HTTP " + std::to_string(reply->status);
      continue;
    }
    try {
      const auto j = detail::json::parse(reply->body);
      Completion c;
      c.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
      if (j.contains("usage")) {
        const auto& u = j["usage"];
        if (u.contains("prompt_tokens")) c.prompt_tokens = u["prompt_tokens"].get<std::int64_t>();
        if (u.contains("completion_tokens"))
          c.completion_tokens = u["completion_tokens"].get<std::int64_t>();
      }
      return c;
    } catch (const detail::json::exception& e) {
      last_error = std::string("malformed response: ") + e.what();
    }
  }
  throw BackendError("chat backend failed after " + std::to_string(options_.attempts) +
                     " attempt(s): " + last_error);
}

}  // namespace agp
