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

#include "emma/oracle.hpp"

#include <stdexcept>

#include <fmt/core.h>

#include "emma/error.hpp"

namespace emma {

SimulatedOracle::SimulatedOracle(MemoryModel memory, std::size_t n_classes, double query_time,
                                 std::uint64_t seed)
    : memory_(memory), n_classes_(n_classes), query_time_(query_time), rng_(seed) {
  if (n_classes_ < 2) {
    throw std::invalid_argument("oracle needs at least 2 classes (no wrong label exists)");
  }
}

QueryResponse SimulatedOracle::answer(const Observation& x) {
  if (x.timestamp > query_time_) {
    throw std::invalid_argument(fmt::format(
        "observation {} at {} is after the query time {}", x.id, x.timestamp, query_time_));
  }
  if (x.true_label >= n_classes_) {
    throw DataError(fmt::format("observation {} has label {} outside [0, {})", x.id,
                                x.true_label, n_classes_));
  }
  const double r = retention(memory_, query_time_ - x.timestamp);
  const double u = rng_.uniform01();
  const auto wrong = static_cast<ActivityIndex>(rng_.uniform_index(n_classes_ - 1));
  if (u < r) return {x.true_label, true};
  return {wrong >= x.true_label ? wrong + 1 : wrong, false};
}

QueryResponse answer_perfect(const ActivityVocabulary& vocabulary, const Observation& x) {
  if (x.true_label >= vocabulary.size()) {
    throw DataError(fmt::format("observation {} has label {} outside the vocabulary", x.id,
                                x.true_label));
  }
  return {x.true_label, true};
}

}  // namespace emma
