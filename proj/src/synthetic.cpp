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

#include "agp/synthetic.hpp"

#include <algorithm>
#include <cctype>
#include <regex>

#include "agp/errors.hpp"
#include "agp/random.hpp"

namespace agp {

namespace {

constexpr std::string_view kGeneralWords[] = {
    "history", "kingdom",  "philosophy", "treaty",  "culture", "empire",  "ethics",
    "law",     "religion", "geography",  "economy", "war",     "citizen", "ancient"};
constexpr std::string_view kMathWords[] = {
    "integer", "equation", "prime",  "triangle", "fraction", "sum",      "product",
    "divisor", "algebra",  "angle",  "ratio",    "digits",   "multiply", "remainder"};
constexpr std::string_view kCodeWords[] = {
    "function", "array",  "string",   "python", "loop",   "compile", "recursion",
    "pointer",  "return", "variable", "class",  "module", "parser",  "stack"};

constexpr std::string_view kFiller[] = {"please", "explain", "carefully", "about",  "given",
                                        "consider", "the",   "question",  "answer", "briefly",
                                        "what",   "why",     "how",       "short",  "detail"};

constexpr std::size_t kTopicWords = 6;

constexpr std::string_view kOpeners[] = {"Question:", "Task:", "Problem:", "Query:"};

const std::regex& fragment_regex() {
  static const std::regex re("fragment ([0-9]) is ([a-z0-9]+)");
  return re;
}

std::uint64_t text_hash(std::string_view text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

template <std::size_t N>
std::string_view pick(const std::string_view (&words)[N], Rng& rng) {
  std::uniform_int_distribution<std::size_t> d(0, N - 1);
  return words[d(rng)];
}

std::string make_task_text(const PlantedFamily& fam, Rng& rng) {
  std::vector<std::string_view> topic(fam.vocabulary.begin(), fam.vocabulary.end());
  std::shuffle(topic.begin(), topic.end(), rng);
  std::string text(pick(kOpeners, rng));
  for (std::size_t i = 0; i < kTopicWords; ++i) {
    text += ' ';
    text += topic[i];
    if (i == kTopicWords / 2) {
      text += ' ';
      text += pick(kFiller, rng);
    }
  }
  text += " ref ";
  text += make_entry_id(rng);
  return text;
}

}  // namespace

const std::array<PlantedFamily, kPlantedFamilies>& planted_families() {
  static const std::array<PlantedFamily, kPlantedFamilies> families = {{
      {"general", Category::kGeneralReasoning, {0, 1, 3}, kGeneralWords},
      {"math", Category::kMathReasoning, {11, 12, 14}, kMathWords},
      {"code", Category::kCodeGeneration, {8, 10, 13}, kCodeWords},
  }};
  return families;
}

std::size_t classify_family(std::string_view text) {
  std::string lower(text);
  for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  std::vector<std::string> words;
  std::string cur;
  for (char c : lower) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      cur += c;
    } else if (!cur.empty()) {
      words.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) words.push_back(std::move(cur));

  std::size_t best = 0;
  std::size_t best_hits = 0;
  for (std::size_t f = 0; f < kPlantedFamilies; ++f) {
    std::size_t hits = 0;
    for (const auto& w : words)
      for (std::string_view v : planted_families()[f].vocabulary) hits += (w == v);
    if (hits > best_hits) {
      best = f;
      best_hits = hits;
    }
  }
  return best;
}

NodeMask planted_mask(std::size_t family, std::size_t n_max) {
  const auto& team = planted_families().at(family).team;
  return NodeMask::from_members(team, n_max);
}

std::string planted_fragment(std::string_view task_text, std::size_t k) {
  static constexpr char kAlphabet[] = "abcdefghijklmnopqrstuvwxyz0123456789";
  std::uint64_t h = derive_seed(text_hash(task_text), static_cast<std::uint64_t>(k));
  std::string out;
  for (int i = 0; i < 4; ++i) {
    out += kAlphabet[h % 36];
    h /= 36;
  }
  return out;
}

std::string planted_answer(std::string_view task_text) {
  std::string out;
  for (std::size_t k = 0; k < kPlantedTeamSize; ++k) {
    if (k) out += '-';
    out += planted_fragment(task_text, k);
  }
  return out;
}

std::vector<TaskSpec> generate_planted_tasks(const std::array<std::size_t, kPlantedFamilies>& counts,
                                             std::uint64_t seed, std::string_view id_prefix) {
  std::vector<TaskSpec> tasks;
  for (std::size_t f = 0; f < kPlantedFamilies; ++f) {
    const PlantedFamily& fam = planted_families()[f];
    Rng rng(derive_seed(seed, fam.name));
    for (std::size_t i = 0; i < counts[f]; ++i) {
      TaskSpec t;
      t.task_id = std::string(id_prefix) + "-" + std::string(fam.name) + "-" + std::to_string(i);
      t.task_text = make_task_text(fam, rng);
      t.category = fam.category;
      t.expected_answer = planted_answer(t.task_text);
      t.check = AnswerCheck::kExact;
      tasks.push_back(std::move(t));
    }
  }
  return tasks;
}

std::array<std::size_t, kPlantedFamilies> planted_ratio_counts(std::size_t total) {
  constexpr std::array<std::size_t, kPlantedFamilies> kRatio = {200, 100, 160};
  constexpr std::size_t kSum = 460;
  std::array<std::size_t, kPlantedFamilies> counts{};
  std::array<std::size_t, kPlantedFamilies> rem{};
  std::size_t used = 0;
  for (std::size_t f = 0; f < kPlantedFamilies; ++f) {
    counts[f] = total * kRatio[f] / kSum;
    rem[f] = total * kRatio[f] % kSum;
    used += counts[f];
  }
  while (used < total) {
    const auto f = static_cast<std::size_t>(std::max_element(rem.begin(), rem.end()) - rem.begin());
    ++counts[f];
    rem[f] = 0;
    ++used;
  }
  return counts;
}

double PlantedEvaluator::evaluate(std::span<const AgentId> members, const TaskSpec& task) {
  const auto& team = planted_families()[classify_family(task.task_text)].team;
  std::size_t overlap = 0;
  for (AgentId a : team) overlap += std::find(members.begin(), members.end(), a) != members.end();
  return static_cast<double>(overlap) / static_cast<double>(kPlantedTeamSize);
}

Completion PlantedAgentBackend::complete(const ChatRequest& request) {
  const auto& team = planted_families()[classify_family(request.task)].team;
  for (std::size_t k = 0; k < kPlantedTeamSize; ++k) {
    if (static_cast<long>(team[k]) == request.agent_id)
      return {"I know that fragment " + std::to_string(k) + " is " +
                  planted_fragment(request.task, k),
              std::nullopt, std::nullopt};
  }
  return {"I have nothing to add.", std::nullopt, std::nullopt};
}

Completion PlantedDecisionBackend::complete(const ChatRequest& request) {
  std::array<std::string, kPlantedTeamSize> found;
  const std::string& text = request.user_prompt;
  for (std::sregex_iterator it(text.begin(), text.end(), fragment_regex()), end; it != end; ++it) {
    const std::size_t k = static_cast<std::size_t>((*it)[1].str()[0] - '0');
    if (k < kPlantedTeamSize && found[k].empty()) found[k] = (*it)[2].str();
  }
  std::string answer;
  for (std::size_t k = 0; k < kPlantedTeamSize; ++k) {
    if (found[k].empty()) return {"unknown", std::nullopt, std::nullopt};
    if (k) answer += '-';
    answer += found[k];
  }
  return {answer, std::nullopt, std::nullopt};
}

BackendSet planted_backends() {
  BackendSet set;
  set.fallback = std::make_shared<PlantedAgentBackend>();
  set.decision = std::make_shared<PlantedDecisionBackend>();
  return set;
}

}  // namespace agp
