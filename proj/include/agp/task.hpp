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

#ifndef AGP_TASK_HPP_
#define AGP_TASK_HPP_

#include <string>
#include <string_view>
#include <vector>

#include "agp/graph.hpp"

namespace agp {

enum class AnswerCheck { kExact, kNumeric, kContains };

std::string_view to_string(AnswerCheck c);
AnswerCheck parse_answer_check(std::string_view s);

/// One task instance with its reference answer.
struct TaskSpec {
  std::string task_id;
  std::string task_text;
  Category category = Category::kGeneralReasoning;
  std::string expected_answer;
  AnswerCheck check = AnswerCheck::kExact;
  double tolerance = 1e-6;  // absolute, for kNumeric

  friend bool operator==(const TaskSpec&, const TaskSpec&) = default;
};

/// exact: equal after trimming whitespace. numeric: the last number in the
/// answer is within `tolerance` of the expected value. contains: substring.
bool check_answer(const TaskSpec& task, std::string_view answer);

/// JSONL, one TaskSpec per line: {"task_id","task_text","category",
/// "expected_answer","check","tolerance"}. Throws FormatError.
std::vector<TaskSpec> parse_tasks(std::string_view jsonl);
std::vector<TaskSpec> load_tasks_file(const std::string& path);
std::string dump_tasks(const std::vector<TaskSpec>& tasks);

}  // namespace agp

#endif  // AGP_TASK_HPP_
