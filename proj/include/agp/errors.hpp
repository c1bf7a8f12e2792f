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

#ifndef AGP_ERRORS_HPP_
#define AGP_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace agp {

/** Base class of every error raised by this library. */
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define AGP_DEFINE_ERROR(Name)          \
  class Name : public Error {           \
   public:                              \
    using Error::Error;                 \
  }

// graph-core
AGP_DEFINE_ERROR(InvalidMembers);
AGP_DEFINE_ERROR(DimensionError);
AGP_DEFINE_ERROR(DegenerateTopology);
AGP_DEFINE_ERROR(ValidationError);

// agent-pool
AGP_DEFINE_ERROR(AnchoringError);
AGP_DEFINE_ERROR(FormatError);

// embedder
AGP_DEFINE_ERROR(EmbeddingUnavailable);

// collector
AGP_DEFINE_ERROR(InvalidOrder);
AGP_DEFINE_ERROR(ScoreUnavailable);
AGP_DEFINE_ERROR(MineUnderflow);

// prune-net
AGP_DEFINE_ERROR(CheckpointError);

// orchestrator
AGP_DEFINE_ERROR(BackendError);
AGP_DEFINE_ERROR(PreconditionError);

// baselines-bench / cli
AGP_DEFINE_ERROR(ConfigError);
AGP_DEFINE_ERROR(FitDegenerate);

#undef AGP_DEFINE_ERROR

/** Raised when the training loss becomes non-finite. */
class TrainingDiverged : public Error {
 public:
  explicit TrainingDiverged(std::size_t step)
      : Error("training diverged at step " + std::to_string(step)),
        step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

}  // namespace agp

#endif  // AGP_ERRORS_HPP_
