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

#include "agp/agent_pool.hpp"

#include <algorithm>

#include "agp/errors.hpp"
#include "json_util.hpp"

namespace agp {

namespace {

using ordered_json = nlohmann::ordered_json;

struct RosterRow {
  const char* role;
  const char* expertise;
  std::vector<std::string> tools;
};

std::vector<AgentProfile> build_default_roster() {
  const std::vector<RosterRow> rows = {
      {"Knowledgeable Expert", "Suggest key entities for external search", {"search"}},
      {"Critic", "Point-by-point flaw inspection", {}},
      {"Psychologist", "Provide psycho-social advice", {}},
      {"Historian", "Analyse past cultural & political events", {}},
      {"Doctor", "Recommend treatments and remedies", {}},
      {"Lawyer", "Legal and policy reasoning", {}},
      {"Economist", "Macro-/micro-economic analysis", {}},
      {"Project Manager", "High-level code structure planning", {}},
      {"Algorithm Designer", "Detailed algorithm design & pseudocode", {}},
      {"Test Analyst", "Generate edge-case tests and critiques", {"python"}},
      {"Bug Fixer", "Produce corrected Python implementations", {"python"}},
      {"Math Solver", "Step-by-step symbolic math derivation", {"wolfram"}},
      {"Mathematical Analyst", "Variable-level proof and numeric check", {"wolfram"}},
      {"Programming Expert", "End-to-end code authoring", {"python"}},
      {"Inspector", "Cross-check reasoning and code consistency", {}},
  };
  std::vector<AgentProfile> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    AgentProfile p;
    p.id = i;
    p.role = rows[i].role;
    p.expertise = rows[i].expertise;
    p.backbone = "gpt-4o-mini";
    p.tools = rows[i].tools;
    out.push_back(std::move(p));
  }
  return out;
}

AgentProfile profile_from_json(const detail::json& j, std::size_t line_no) {
  const std::string where = "profile line " + std::to_string(line_no);
  if (!j.is_object()) throw FormatError(where + ": expected a JSON object");
  if (!j.contains("id") || !j["id"].is_number_unsigned())
    throw FormatError(where + ": missing or non-integer id");
  if (!j.contains("role") || !j["role"].is_string())
    throw FormatError(where + ": missing role");
  AgentProfile p;
  p.id = j["id"].get<AgentId>();
  p.role = j["role"].get<std::string>();
  if (p.role.empty()) throw FormatError(where + ": empty role");
  try {
    p.expertise = j.value("expertise", std::string{});
    p.backbone = j.value("backbone", std::string{});
    p.tools = j.value("tools", std::vector<std::string>{});
    p.system_template = j.value("system_template", std::string(kDefaultSystemTemplate));
  } catch (const detail::json::exception& e) {
    throw FormatError(where + ": " + e.what());
  }
  return p;
}

}  // namespace

AgentPool::AgentPool(std::vector<AgentProfile> agents) : agents_(std::move(agents)) {
  std::sort(agents_.begin(), agents_.end(),
            [](const AgentProfile& a, const AgentProfile& b) { return a.id < b.id; });
  for (std::size_t k = 0; k < agents_.size(); ++k) {
    if (agents_[k].id == k) continue;
    if (k > 0 && agents_[k].id == agents_[k - 1].id)
      throw AnchoringError("duplicate agent id " + std::to_string(agents_[k].id));
    throw AnchoringError("agent ids must be 0.." + std::to_string(agents_.size() - 1) +
                         " without gaps; missing id " + std::to_string(k));
  }
}

AgentId AgentPool::find_role(std::string_view role) const {
  for (const auto& a : agents_)
    if (a.role == role) return a.id;
  return agents_.size();
}

AgentPool load_pool(std::string_view source) {
  std::vector<AgentProfile> agents;
  detail::for_each_line(source, [&](std::string_view line, std::size_t line_no) {
    agents.push_back(profile_from_json(detail::parse_json(line, "profile"), line_no));
  });
  if (agents.empty()) throw FormatError("profile file contains no agents");
  return AgentPool(std::move(agents));
}

AgentPool load_pool_file(const std::string& path) { return load_pool(detail::read_file(path)); }

std::string dump_pool(const AgentPool& pool) {
  std::string out;
  for (const auto& p : pool.agents()) {
    ordered_json j;
    j["id"] = p.id;
    j["role"] = p.role;
    j["expertise"] = p.expertise;
    j["backbone"] = p.backbone;
    j["tools"] = p.tools;
    j["system_template"] = p.system_template;
    out += j.dump();
    out += '\n';
  }
  return out;
}

const AgentPool& default_pool() {
  static const AgentPool pool(build_default_roster());
  return pool;
}

std::string profile_text(const AgentProfile& p) {
  if (p.role.empty() && p.expertise.empty()) return {};
  std::string s = "You are the " + p.role;
  if (!p.expertise.empty()) s += ". Your primary duty: " + p.expertise;
  return s;
}

std::vector<std::string> profile_warnings(const AgentProfile& p) {
  std::vector<std::string> w;
  if (profile_text(p).empty()) w.push_back("agent " + std::to_string(p.id) + ": empty profile");
  if (p.expertise.empty()) w.push_back("agent " + std::to_string(p.id) + ": no expertise line");
  if (p.system_template.find(kTaskSlot) == std::string::npos)
    w.push_back("agent " + std::to_string(p.id) + ": template has no <Task> slot");
  return w;
}

std::string fill_template(std::string_view tmpl, std::string_view profile, std::string_view task) {
  std::string out;
  out.reserve(tmpl.size() + profile.size() + task.size());
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    if (tmpl.compare(pos, kProfileSlot.size(), kProfileSlot) == 0) {
      out += profile;
      pos += kProfileSlot.size();
    } else if (tmpl.compare(pos, kTaskSlot.size(), kTaskSlot) == 0) {
      out += task;
      pos += kTaskSlot.size();
    } else {
      out.push_back(tmpl[pos++]);
    }
  }
  return out;
}

std::string render_system_prompt(const AgentProfile& p, std::string_view task) {
  return fill_template(p.system_template, profile_text(p), task);
}

std::string history_json(std::span<const HistoryItem> history) {
  ordered_json arr = ordered_json::array();
  for (const auto& h : history) {
    ordered_json e;
    e["id"] = h.id;
    e["role"] = h.role;
    e["output"] = h.output;
    arr.push_back(std::move(e));
  }
  return arr.dump();
}

std::string render_user_prompt(std::span<const HistoryItem> history) {
  return std::string(kUserPromptPrefix) + history_json(history);
}

std::vector<HistoryItem> parse_history_json(std::string_view text) {
  const auto j = detail::parse_json(text, "dialogue history");
  if (!j.is_array()) throw FormatError("dialogue history: expected an array");
  std::vector<HistoryItem> out;
  try {
    for (const auto& e : j)
      out.push_back({e.at("id").get<std::string>(), e.at("role").get<std::string>(),
                     e.at("output").get<std::string>()});
  } catch (const detail::json::exception& e) {
    throw FormatError(std::string("dialogue history: ") + e.what());
  }
  return out;
}

std::string make_entry_id(std::mt19937_64& rng) {
  static constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
  std::string id(4, ' ');
  for (char& c : id) c = kAlphabet[rng() % 36];
  return id;
}

}  // namespace agp
