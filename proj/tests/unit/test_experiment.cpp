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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <tuple>
#include <sstream>

#include "emma/dataset_csv.hpp"
#include "emma/error.hpp"
#include "emma/experiment.hpp"

using namespace emma;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  SyntheticSpec spec;
  spec.m = 150;
  spec.seed = 3;
  spec.switch_prob = 0.3;
  c.synthetic = spec;
  c.strategies = {StrategyKind::kEmma, StrategyKind::kUb};
  c.retention_levels = {{"R1", 0.1}};
  c.budgets = {5, 10};
  c.repeats = 2;
  c.classifier.epochs = 60;
  c.base_seed = 9;
  return c;
}

std::string results_text(const SweepResult& r) {
  std::ostringstream out;
  write_results_csv(out, r.records);
  return out.str();
}

ResultRecord rec(std::int64_t subject, std::size_t repeat, double acc) {
  ResultRecord r;
  r.retention_name = "R1";
  r.budget = 5;
  r.subject = subject;
  r.repeat = repeat;
  r.final_accuracy = acc;
  return r;
}

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::string config_error(const std::string& text) {
  try {
    parse(text).validate();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "no error";
}

}  // namespace

TEST_CASE("config parsing") {
  const ExperimentConfig c = parse(
      "strategies = emma, lb\n"
      "retention_levels = five\n"
      "budgets = 5, 10\n"
      "repeats = 3\n"
      "base_seed = 12\n"
      "[classifier]\n"
      "epochs = 40\n"
      "[synthetic]\n"
      "m = 100\n"
      "noise_sigma = 2.5\n");
  CHECK(c.strategies == std::vector<StrategyKind>{StrategyKind::kEmma, StrategyKind::kLb});
  CHECK(c.retention_levels.size() == 5);
  CHECK(c.retention_levels[1].target_low == 0.2);
  CHECK(c.budgets == std::vector<std::size_t>{5, 10});
  CHECK(c.repeats == 3);
  CHECK(c.base_seed == 12);
  CHECK(c.classifier.epochs == 40);
  REQUIRE(c.synthetic);
  CHECK(c.synthetic->m == 100);
  CHECK(c.synthetic->noise_sigma == 2.5);

  const ExperimentConfig d = parse("retention_levels = low:0.1, high:0.9\n[synthetic]\n");
  CHECK(d.retention_levels.size() == 2);
  CHECK(d.retention_levels[1].name == "high");
  CHECK(d.budgets.size() == 8);
  CHECK(d.repeats == 30);
}

TEST_CASE("config errors name the offending field") {
  const std::string bad_strategy = config_error("strategies = emma, random\n[synthetic]\n");
  CHECK(bad_strategy.find("random") != std::string::npos);
  CHECK(bad_strategy.find("mma") != std::string::npos);
  CHECK(config_error("budgets = 10, 5\n[synthetic]\n").find("budgets") != std::string::npos);
  CHECK(config_error("budgets = 0\n[synthetic]\n").find("budgets") != std::string::npos);
  CHECK(config_error("repeats = 0\n[synthetic]\n").find("repeats") != std::string::npos);
  CHECK(config_error("colour = blue\n[synthetic]\n").find("colour") != std::string::npos);
  CHECK(config_error("[synthetic]\nwidth = 3\n").find("width") != std::string::npos);
  CHECK(config_error("repeats = 2\n") != "no error");  // no data source
  CHECK(config_error("dataset = x.csv\n[synthetic]\n") != "no error");  // two sources
  CHECK(config_error("[synthetic]\nswitch_prob = 2\n").find("switch_prob") != std::string::npos);
}

TEST_CASE("record count and cell layout") {
  ExperimentConfig c = small_config();
  const SweepResult r = run_sweep(c, {1, false});
  CHECK(r.records.size() == 1 * 1 * 2 * 2 * 2);
  for (const auto& x : r.records) {
    CHECK(x.queries <= x.budget);
    CHECK(x.final_accuracy >= 0.0);
    CHECK(x.final_accuracy <= 1.0);
    CHECK(x.noisy_fraction >= 0.0);
    CHECK(x.noisy_fraction <= 1.0);
    if (x.strategy == StrategyKind::kUb) CHECK(x.noisy_fraction == 0.0);
  }

  c.strategies = {StrategyKind::kEmma};
  c.budgets = {5};
  CHECK(run_sweep(c, {1, false}).records.size() == 2);
}

TEST_CASE("multi-subject dataset: one block of records per subject") {
  const auto dir = std::filesystem::temp_directory_path() / "emma_test_experiment";
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "data.csv");
    out << "subject,timestamp,label,f0\n";
    for (int s = 1; s <= 2; ++s) {
      for (int i = 0; i < 40; ++i) {
        out << s << ',' << i << ',' << (i / 5) % 2 << ',' << ((i / 5) % 2 ? 1.0 : -1.0) + 0.1 * (i % 5)
            << '\n';
      }
    }
  }
  std::ofstream(dir / "c.ini") << "dataset = data.csv\nstrategies = ema\nretention_levels = R1:0.1\n"
                                  "budgets = 3\nrepeats = 2\n[classifier]\nepochs = 30\n";
  const ExperimentConfig c = load_config((dir / "c.ini").string());
  const SweepResult r = run_sweep(c, {1, false});
  CHECK(r.records.size() == 4);
  CHECK(r.records[0].subject == 1);
  CHECK(r.records[3].subject == 2);
  std::filesystem::remove_all(dir);
}

TEST_CASE("sweep output is deterministic and independent of jobs") {
  const ExperimentConfig c = small_config();
  const std::string a = results_text(run_sweep(c, {1, false}));
  CHECK(a == results_text(run_sweep(c, {1, false})));
  CHECK(a == results_text(run_sweep(c, {3, false})));
  ExperimentConfig other = c;
  other.base_seed = 10;
  CHECK(a != results_text(run_sweep(other, {1, false})));
}

TEST_CASE("paired seeds: strategies share split, initial draw and oracle stream") {
  ExperimentConfig c = small_config();
  c.strategies = {StrategyKind::kEmma, StrategyKind::kEma, StrategyKind::kMma, StrategyKind::kLb};
  c.retention_levels = {{"R1", 0.1}, {"R3", 0.7}};
  const SweepPlan plan = plan_sweep(c);
  std::map<std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>, std::uint64_t> oracle;
  std::set<std::uint64_t> cell_seeds;
  for (const auto& cell : plan.cells) {
    const auto key = std::make_tuple(cell.subject_index, cell.level, cell.budget_index, cell.repeat);
    const auto [it, fresh] = oracle.emplace(key, cell.oracle_seed);
    if (!fresh) CHECK(it->second == cell.oracle_seed);
    CHECK(cell_seeds.insert(cell.cell_seed).second);
  }
  // One prepared split/initial set per (subject, repeat), reused by every cell.
  REQUIRE(plan.subjects.size() == 1);
  CHECK(plan.subjects[0].repeats.size() == c.repeats);
  CHECK(plan.subjects[0].repeats[0].initial.ids() != plan.subjects[0].repeats[1].initial.ids());
  // Replanning reproduces the same initial draws.
  const SweepPlan again = plan_sweep(c);
  CHECK(again.subjects[0].repeats[1].initial.ids() == plan.subjects[0].repeats[1].initial.ids());
}

TEST_CASE("expected noisy fraction lies in the retention-range complement") {
  ExperimentConfig c = small_config();
  c.strategies = {StrategyKind::kEmma, StrategyKind::kEma, StrategyKind::kMma, StrategyKind::kLb};
  c.retention_levels = {{"R1", 0.1}, {"R3", 0.7}};
  c.budgets = {10};
  c.repeats = 30;
  c.classifier.epochs = 30;
  const SweepPlan plan = plan_sweep(c);
  const SweepResult r = execute_plan(plan, {1, false});
  for (std::size_t level = 0; level < 2; ++level) {
    // Widest range over the repeats' training pools.
    double low = 1.0, high = 0.0;
    for (const auto& rep : plan.subjects[0].repeats) {
      const RetentionRange range = retention_range(rep.train, plan.subjects[0].query_time,
                                                   plan.subjects[0].memories[level]);
      low = std::min(low, range.low);
      high = std::max(high, range.high);
    }
    CHECK(low >= c.retention_levels[level].target_low - 1e-12);
    for (StrategyKind kind : c.strategies) {
      std::vector<double> f;
      for (const auto& x : r.records) {
        if (x.strategy == kind && x.retention_name == c.retention_levels[level].name) {
          f.push_back(x.noisy_fraction);
        }
      }
      REQUIRE(f.size() == 30);
      double mean = 0, sq = 0;
      for (double v : f) mean += v;
      mean /= f.size();
      for (double v : f) sq += (v - mean) * (v - mean);
      const double se = std::sqrt(sq / (f.size() - 1) / f.size());
      CHECK(mean >= 1.0 - high - 3 * se);
      CHECK(mean <= 1.0 - low + 3 * se);
    }
  }
}

TEST_CASE("curves come from the largest budget") {
  const ExperimentConfig c = small_config();
  const SweepResult r = run_sweep(c, {1, true});
  // 2 strategies x 2 repeats x 10 queries.
  CHECK(r.curves.size() == 2 * 2 * 10);
  CHECK(r.curves.front().query_index == 1);
}

TEST_CASE("aggregate: singleton, mean, subject weighting, order invariance") {
  CHECK_THROWS_AS(aggregate(std::vector<ResultRecord>{}), DataError);

  const auto one = aggregate(std::vector<ResultRecord>{rec(1, 0, 0.7)});
  REQUIRE(one.size() == 1);
  CHECK(one[0].mean_accuracy == 0.7);
  CHECK(one[0].std_accuracy == 0.0);

  const auto two = aggregate(std::vector<ResultRecord>{rec(1, 0, 0.4), rec(1, 1, 0.6)});
  CHECK(std::abs(two[0].mean_accuracy - 0.5) < 1e-15);
  CHECK(std::abs(two[0].std_accuracy - 0.1) < 1e-15);

  // Subject 1 repeat mean 0.3, subject 2 repeat mean 0.9: subjects weigh equally.
  std::vector<ResultRecord> v{rec(1, 0, 0.2), rec(1, 1, 0.4), rec(2, 0, 0.9)};
  const auto rows = aggregate(v);
  CHECK(std::abs(rows[0].mean_accuracy - 0.6) < 1e-15);
  CHECK(rows[0].subjects == 2);
  CHECK(rows[0].records == 3);

  std::vector<ResultRecord> shuffled{v[2], v[0], v[1]};
  const auto again = aggregate(shuffled);
  CHECK(again[0].mean_accuracy == rows[0].mean_accuracy);
  CHECK(again[0].std_accuracy == rows[0].std_accuracy);
}

TEST_CASE("results CSV round trip and malformed input") {
  const SweepResult r = run_sweep(small_config(), {1, false});
  std::istringstream in(results_text(r));
  const auto back = read_results_csv(in);
  REQUIRE(back.size() == r.records.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].final_accuracy == r.records[i].final_accuracy);
    CHECK(back[i].cum_objective == r.records[i].cum_objective);
    CHECK(back[i].seed == r.records[i].seed);
    CHECK(back[i].strategy == r.records[i].strategy);
  }

  auto error_of = [](const std::string& text) {
    std::istringstream s(text);
    try {
      read_results_csv(s);
    } catch (const DataError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  const std::string header =
      "strategy,retention,strength_s,budget,repeat,subject,final_accuracy,noisy_fraction,"
      "cum_objective,queries,seed\n";
  CHECK(error_of("bogus\n") != "no error");
  CHECK(error_of(header + "emma,R1,1,5,0,0,0.5,0,0,5,1\nemma,R1,1,5,1,0,abc,0,0,5,1\n")
            .find("line 3") != std::string::npos);
  CHECK(error_of(header + "emma,R1,1,5,0,0,1.5,0,0,5,1\n").find("final_accuracy") !=
        std::string::npos);
  CHECK(error_of(header + "nope,R1,1,5,0,0,0.5,0,0,5,1\n") != "no error");
}
