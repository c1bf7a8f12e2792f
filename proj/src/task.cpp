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

#include "agp/task.hpp"

#include <cmath>
#include <cstdlib>
#include <regex>

#include "agp/errors.hpp"
#include "json_util.hpp"

namespace agp {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::optional<double> last_number(std::string_view text) {
  static const std::regex number(R"([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)");
  std::optional<double> last;
  const std::string s(text);
  for (auto it = std::sregex_iterator(s.begin(), s.end(), number); it != std::sregex_iterator();
       ++it)
    last = std::strtod(it->str().c_str(), nullptr);
  return last;
}

}  // namespace

std::string_view to_string(AnswerCheck c) {
  switch (c) {
    case AnswerCheck::kExact: return "exact";
    case AnswerCheck::kNumeric: return "numeric";
    case AnswerCheck::kContains: return "contains";
  }
  return "exact";
}

AnswerCheck parse_answer_check(std::string_view s) {
  if (s == "exact") return AnswerCheck::kExact;
  if (s == "numeric") return AnswerCheck::kNumeric;
  if (s == "contains") return AnswerCheck::kContains;
  throw FormatError("unknown answer check '" + std::string(s) + "'");
}

bool check_answer(const TaskSpec& task, std::string_view answer) {
  switch (task.check) {
    case AnswerCheck::kExact:
      return trim(answer) == trim(task.expected_answer);
    case AnswerCheck::kContains:
      return answer.find(trim(task.expected_answer)) != std::string_view::npos;
    case AnswerCheck::kNumeric: {
      const auto got = last_number(answer);
      const auto want = last_number(task.expected_answer);
      return got && want && std::fabs(*got - *want) <= task.tolerance;
    }
  }
  return false;
}

std::vector<TaskSpec> parse_tasks(std::string_view jsonl) {
  std::vector<TaskSpec> tasks;
  detail::for_each_line(jsonl, [&](std::string_view line, std::size_t line_no) {
    const auto j = detail::parse_json(line, "task");
    const std::string where = "task line " + std::to_string(line_no);
    TaskSpec t;
    try {
      t.task_id = j.at("task_id").get<std::string>();
      t.task_text = j.at("task_text").get<std::string>();
      t.category = parse_category(j.value("category", std::string("general_reasoning")));
      t.expected_answer = j.value("expected_answer", std::string{});
      t.check = parse_answer_check(j.value("check", std::string("exact")));
      t.tolerance = j.value("tolerance", 1e-6);
    } catch (const detail::json::exception& e) {
      throw FormatError(where + ": " + e.what());
    }
    tasks.push_back(std::move(t));
  });
  return tasks;
}

std::vector<TaskSpec> load_tasks_file(const std::string& path) {
  return parse_tasks(detail::read_file(path));
}

std::string dump_tasks(const std::vector<TaskSpec>& tasks) {
  std::string out;
  for (const auto& t : tasks) {
    nlohmann::ordered_json j;
    j["task_id"] = t.task_id;
    j["task_text"] = t.task_text;
    j["category"] = std::string(to_string(t.category));
    j["expected_answer"] = t.expected_answer;
    j["check"] = std::string(to_string(t.check));
    j["tolerance"] = t.tolerance;
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace agp
