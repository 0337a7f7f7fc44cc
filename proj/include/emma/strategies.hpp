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
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "emma/classifier.hpp"
#include "emma/core_data.hpp"
#include "emma/memory.hpp"
#include "emma/oracle.hpp"
#include "emma/rng.hpp"

namespace emma {

enum class StrategyKind { kEmma, kEma, kMma, kUb, kLb };

inline constexpr StrategyKind kAllStrategies[] = {StrategyKind::kEmma, StrategyKind::kEma,
                                                  StrategyKind::kMma, StrategyKind::kUb,
                                                  StrategyKind::kLb};

std::string_view to_string(StrategyKind kind);
// Accepts "emma|ema|mma|ub|lb" (case-insensitive); throws ConfigError otherwise.
StrategyKind parse_strategy(std::string_view name);

enum class OracleMode { kSimulated, kPerfect };

// UB queries the perfect oracle; every other strategy the forgetting one.
OracleMode default_oracle_mode(StrategyKind kind);

struct GainScore {
  double entropy_term = 0.0;
  double retention_term = 1.0;
  double gain = 0.0;
};

/// Shannon entropy in nats, with 0 ln 0 = 0. Throws std::invalid_argument
/// unless entries are >= 0 and sum to 1 within 1e-6.
double entropy(std::span<const double> dist);

/// Expected gain for one observation:
///   EMMA  e * r      EMA  e      MMA  r      UB  e
/// LB ignores gains; its score carries e * r for bookkeeping only.
GainScore gain(StrategyKind kind, double entropy_val, double retention_val);

struct Selection {
  std::size_t position = 0;  // index into the pool view
  ObservationId id = 0;
  GainScore score;           // EMMA objective terms for the selected item
};

/// Picks the next observation to query. Gain strategies take the argmax,
/// breaking exact ties by larger timestamp and then smaller id; LB draws
/// uniformly from `rng`.
Selection select_next(StrategyKind kind, const Pool& pool_view, const SoftmaxClassifier& model,
                      const MemoryModel& memory, double query_time, RngStream& rng);
Selection select_next(StrategyKind kind, std::span<const Observation> candidates,
                      const SoftmaxClassifier& model, const MemoryModel& memory,
                      double query_time, RngStream& rng);

struct SessionOptions {
  StrategyKind kind = StrategyKind::kEmma;
  std::size_t budget = 0;
  double query_time = 0.0;
  ClassifierParams classifier;
  std::uint64_t oracle_seed = 0;
  std::uint64_t selection_seed = 0;
  std::optional<OracleMode> oracle_mode;  // defaults to default_oracle_mode(kind)
  bool record_accuracy_curve = true;
};

struct SessionTrace {
  StrategyKind kind = StrategyKind::kEmma;
  std::vector<ObservationId> query_order;
  std::vector<QueryResponse> labels_received;
  std::vector<GainScore> selected_scores;
  std::vector<double> accuracy_curve;        // after each query
  std::vector<double> cumulative_objective;  // running sum of e * r at selection time
  double initial_accuracy = 0.0;
  double final_accuracy = 0.0;
  bool truncated = false;  // pool ran out before the budget
  LabeledSet labeled;      // initial set plus every answered query

  std::size_t queries() const { return query_order.size(); }
  double total_objective() const {
    return cumulative_objective.empty() ? 0.0 : cumulative_objective.back();
  }
  // Fraction of oracle answers that were wrong (0 when no queries ran).
  double noisy_fraction() const;
};

/// Greedy active-learning loop: fit on the initial labeled set, then up to
/// `budget` times score the remaining pool, select, query, add the label,
/// and refit from scratch. Observations already in `initial` are removed from
/// `train` before the loop. The test pool is used only for accuracy.
SessionTrace run_session(const SessionOptions& options, const Pool& train, const Pool& test,
                         const ActivityVocabulary& vocabulary, const MemoryModel& memory,
                         const LabeledSet& initial);

/// Same, drawing `init_k` correct initial labels from `train` with `init_seed`.
SessionTrace run_session(const SessionOptions& options, const Pool& train, const Pool& test,
                         const ActivityVocabulary& vocabulary, const MemoryModel& memory,
                         std::size_t init_k, std::uint64_t init_seed);

}  // namespace emma
