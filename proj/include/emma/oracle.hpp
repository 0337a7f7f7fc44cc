// Copyright 2026 The EMMA Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "emma/core_data.hpp"
#include "emma/memory.hpp"
#include "emma/rng.hpp"

namespace emma {

struct QueryResponse {
  ActivityIndex label = 0;
  bool was_correct = true;  // instrumentation only
};

/// Simulated annotator with Ebbinghaus forgetting. Answers correctly with
/// probability R = retention(memory, t_q - timestamp), otherwise with a label
/// drawn uniformly from the other n-1 classes.
///
/// Each call consumes exactly two draws from the stream (the Bernoulli
/// uniform and the wrong-class index) whatever the outcome, so trajectories
/// sharing a seed stay aligned across strategies.
class SimulatedOracle {
 public:
  SimulatedOracle(MemoryModel memory, std::size_t n_classes, double query_time,
                  std::uint64_t seed);

  QueryResponse answer(const Observation& x);

  const MemoryModel& memory() const { return memory_; }
  double query_time() const { return query_time_; }

 private:
  MemoryModel memory_;
  std::size_t n_classes_;
  double query_time_;
  RngStream rng_;
};

/// Perfect-memory annotator: always the true label.
QueryResponse answer_perfect(const ActivityVocabulary& vocabulary, const Observation& x);

}  // namespace emma
