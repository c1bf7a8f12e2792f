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

// Command-line front end: synth, collect, train, design, run, bench, export.
//
// Settings resolve as flags > config file > environment > defaults. The
// config file is INI with one section per module:
//
//   [global]     seed, parallelism
//   [paths]      pool, corpus, checkpoint
//   [embedding]  backend (hashing|http), endpoint, dim, timeout_ms
//   [agent]      backend (echo|planted|http), endpoint, model, api_key,
//                temperature, timeout_ms
//   [collector]  budget, sigma, mu, top_k, evaluator (planted|orchestrator)
//   [train]      lr, epochs, batch, beta, lambda_off, lambda_s, lambda_c, ...
//   [run]        k, theta
//
// Environment: AGP_API_KEY, AGP_EMBEDDING_ENDPOINT, AGP_CHAT_ENDPOINT.

#ifndef AGP_CLI_HPP_
#define AGP_CLI_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace agp {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitExternal = 2,
  kExitTraining = 3,
  kExitCheckpoint = 4,
  kExitRunAborted = 5,
};

/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace agp

#endif  // AGP_CLI_HPP_
