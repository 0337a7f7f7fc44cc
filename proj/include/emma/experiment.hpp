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
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "emma/classifier.hpp"
#include "emma/memory.hpp"
#include "emma/strategies.hpp"
#include "emma/synthetic.hpp"

namespace emma {

/// Default comparative levels: 10%, 25% and 70% retention at the oldest lag.
std::vector<RetentionLevel> comparative_retention_levels();
/// The five-level ladder R1..R5 = 10%, 20%, 30%, 50%, 70%.
std::vector<RetentionLevel> five_retention_levels();

struct ExperimentConfig {
  // Exactly one data source.
  std::optional<std::string> dataset_path;
  std::optional<std::vector<std::string>> activities;  // fixes the CSV vocabulary
  std::optional<SyntheticSpec> synthetic;

  std::vector<StrategyKind> strategies{std::begin(kAllStrategies), std::end(kAllStrategies)};
  std::vector<RetentionLevel> retention_levels = comparative_retention_levels();
  std::vector<std::size_t> budgets{5, 10, 20, 40, 60, 100, 140, 200};
  std::size_t repeats = 30;
  std::size_t init_k = 2;
  double test_fraction = 0.3;
  std::uint64_t base_seed = 0;
  double tq_offset = 0.0;  // t_q = latest subject timestamp + offset
  ClassifierParams classifier;

  void validate() const;
};

/// Reads the INI-style config: top-level `key = value` pairs plus optional
/// [classifier] and [synthetic] sections. Relative dataset paths resolve
/// against `base_dir`. Unknown keys are errors.
ExperimentConfig parse_config(std::istream& in, const std::string& base_dir = ".");
ExperimentConfig load_config(const std::string& path);

/// Reads only the [synthetic] section (used by `emma generate`).
SyntheticSpec load_synthetic_spec(const std::string& path);

struct ResultRecord {
  StrategyKind strategy = StrategyKind::kEmma;
  std::string retention_name;
  double strength_s = 0.0;
  std::size_t budget = 0;
  std::size_t repeat = 0;
  std::int64_t subject = 0;
  double final_accuracy = 0.0;
  double noisy_fraction = 0.0;
  double cum_objective = 0.0;
  std::size_t queries = 0;
  std::uint64_t seed = 0;
};

struct CurvePoint {
  StrategyKind strategy = StrategyKind::kEmma;
  std::string retention_name;
  std::size_t repeat = 0;
  std::int64_t subject = 0;
  std::size_t query_index = 0;  // 1-based
  double accuracy = 0.0;
};

struct SweepOptions {
  unsigned jobs = 0;  // 0: one worker per hardware thread
  bool collect_curves = false;
};

struct SweepResult {
  std::vector<ResultRecord> records;  // ordered by (subject, level, strategy, budget, repeat)
  std::vector<CurvePoint> curves;     // largest-budget session of each cell
};

/// Standardized split and initial labeled draw for one (subject, repeat).
struct PreparedRepeat {
  Pool train;
  Pool test;
  LabeledSet initial;
};

struct SubjectPlan {
  std::int64_t subject = 0;
  double query_time = 0.0;
  std::vector<MemoryModel> memories;     // one per retention level
  std::vector<PreparedRepeat> repeats;
};

struct CellPlan {
  std::size_t subject_index = 0;
  std::size_t level = 0;
  std::size_t strategy = 0;
  std::size_t budget_index = 0;
  std::size_t repeat = 0;
  std::uint64_t cell_seed = 0;
  std::uint64_t oracle_seed = 0;
  std::uint64_t selection_seed = 0;
};

struct SweepPlan {
  ExperimentConfig config;
  ActivityVocabulary vocabulary;
  std::vector<SubjectPlan> subjects;
  std::vector<CellPlan> cells;  // ordered by (subject, level, strategy, budget, repeat)
};

/// Loads the data and prepares every session up front, so data and config
/// errors surface before any session runs.
///
/// Seeds come from derive_seed(base_seed, coordinates). The split, feature
/// standardization and initial labeled draw depend only on (subject,
/// repeat), so every strategy and level starts from the same labeled set.
/// The oracle stream depends on (subject, level, budget, repeat) and is
/// shared by all strategies in that cell.
SweepPlan plan_sweep(const ExperimentConfig& config);

/// Runs every planned session. Output order does not depend on `jobs`.
SweepResult execute_plan(const SweepPlan& plan, const SweepOptions& options = {});

/// plan_sweep followed by execute_plan.
SweepResult run_sweep(const ExperimentConfig& config, const SweepOptions& options = {});

struct AggregateRow {
  StrategyKind strategy = StrategyKind::kEmma;
  std::string retention_name;
  std::size_t budget = 0;
  double mean_accuracy = 0.0;  // mean over subjects of per-subject repeat means
  double std_accuracy = 0.0;   // mean over subjects of per-subject population std
  double mean_noisy_fraction = 0.0;
  std::size_t subjects = 0;
  std::size_t records = 0;
};

/// Groups by (strategy, retention, budget); independent of input order.
std::vector<AggregateRow> aggregate(std::span<const ResultRecord> records);

void write_results_csv(std::ostream& out, std::span<const ResultRecord> records);
std::vector<ResultRecord> read_results_csv(std::istream& in);
void write_curves_csv(std::ostream& out, std::span<const CurvePoint> curves);
void write_aggregate_csv(std::ostream& out, std::span<const AggregateRow> rows);

/// Fixed-width text table of mean accuracy per cell.
std::string format_summary(std::span<const AggregateRow> rows);

}  // namespace emma
