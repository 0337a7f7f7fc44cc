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

#include <cstdint>
#include <vector>

#include "emma/classifier.hpp"
#include "emma/core_data.hpp"
#include "emma/memory.hpp"
#include "emma/strategies.hpp"

namespace emma {

inline constexpr std::size_t kMaxBruteForcePool = 8;
inline constexpr std::size_t kMaxBruteForceBudget = 3;

/// Number of ordered subsets of size 1..B drawn from m items:
/// sum_{b=1}^{B} m! / (m-b)!. Throws std::overflow_error once the count
/// reaches 2^62.
std::uint64_t count_ordered_subsets(std::uint64_t m, std::uint64_t budget);

struct GrowthApproximation {
  std::uint64_t exact = 0;
  std::uint64_t approx = 0;  // m^B
  double relative_gap = 0.0;  // |exact - approx| / approx
};

GrowthApproximation verify_mB_approximation(std::uint64_t m, std::uint64_t budget);

struct EnumerationReport {
  std::size_t m = 0;
  std::size_t budget = 0;
  std::uint64_t count_enumerated = 0;
  double best_objective = 0.0;
  std::vector<ObservationId> best_sequence;
  double greedy_objective = 0.0;
  std::vector<ObservationId> greedy_sequence;
  double ratio = 1.0;  // greedy / best; 1 when best is 0
  double enumeration_seconds = 0.0;
};

struct BruteForceProblem {
  Pool train;  // candidate pool; ids in `initial` are excluded
  Pool test;
  ActivityVocabulary vocabulary;
  MemoryModel memory;
  double query_time = 0.0;
  LabeledSet initial;
  ClassifierParams classifier;
};

/// Replays every ordered subset of at most `budget` candidates (refitting
/// after each label) and keeps the one with the largest summed e * r, ties
/// going to the lexicographically smallest id sequence. Also runs the greedy
/// session on the same instance. Only the perfect oracle is supported, so
/// every sequence has a deterministic objective. Requires m <= 8, B <= 3.
EnumerationReport optimal_session(const BruteForceProblem& problem, std::size_t budget,
                                  OracleMode oracle_mode = OracleMode::kPerfect);

/// Small seeded instance: m candidates, two initial labels and a test pool
/// drawn from one synthetic sequence (3 classes, 2 features), with memory
/// calibrated to retention 0.1 at the oldest candidate.
BruteForceProblem make_tiny_instance(std::size_t m, std::uint64_t seed);

}  // namespace emma
