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

// Command-line entry point: dataset generation, sweeps, brute-force
// verification and result aggregation.
//
// Exit codes: 0 success, 1 usage, 2 data/config error, 3 invariant violation.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "emma/bruteforce.hpp"
#include "emma/dataset_csv.hpp"
#include "emma/error.hpp"
#include "emma/experiment.hpp"
#include "emma/synthetic.hpp"
#include "emma/text.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInvariant = 3;

constexpr const char* kSeedEnv = "EMMA_BASE_SEED";

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw emma::DataError(fmt::format("cannot write '{}'", path));
  return out;
}

std::optional<std::uint64_t> seed_from_env() {
  const char* value = std::getenv(kSeedEnv);
  if (value == nullptr || *value == '\0') return std::nullopt;
  try {
    const std::int64_t v = emma::parse_int(value, kSeedEnv, 0);
    if (v < 0) throw emma::DataError("negative");
    return static_cast<std::uint64_t>(v);
  } catch (const emma::DataError&) {
    throw emma::ConfigError(fmt::format("{} must be a non-negative integer, got '{}'", kSeedEnv, value));
  }
}

int cmd_generate(const std::string& spec_path, const std::string& out_path) {
  const emma::SyntheticSpec spec = emma::load_synthetic_spec(spec_path);
  const emma::Pool pool = emma::generate(spec);
  auto out = open_output(out_path);
  emma::write_dataset_csv(out, pool, emma::ActivityVocabulary::numbered(spec.n_classes));
  std::cout << fmt::format("wrote {} observations ({} classes, d={}) to {}\n", pool.size(),
                           spec.n_classes, spec.d, out_path);
  return 0;
}

int cmd_run(const std::string& config_path, const std::string& out_path,
            const std::string& curves_path, unsigned jobs) {
  emma::ExperimentConfig config = emma::load_config(config_path);
  if (auto seed = seed_from_env()) config.base_seed = *seed;
  emma::SweepOptions options;
  options.jobs = jobs;
  options.collect_curves = !curves_path.empty();
  const emma::SweepResult result = emma::run_sweep(config, options);
  {
    auto out = open_output(out_path);
    emma::write_results_csv(out, result.records);
  }
  if (!curves_path.empty()) {
    auto out = open_output(curves_path);
    emma::write_curves_csv(out, result.curves);
  }
  std::cout << emma::format_summary(emma::aggregate(result.records));
  std::cout << fmt::format("{} records written to {}\n", result.records.size(), out_path);
  return 0;
}

std::string join_ids(const std::vector<emma::ObservationId>& ids) {
  std::string s;
  for (std::size_t i = 0; i < ids.size(); ++i) s += (i ? ";" : "") + std::to_string(ids[i]);
  return s;
}

int cmd_bruteforce(std::size_t m, std::size_t budget, std::uint64_t seed) {
  if (m > emma::kMaxBruteForcePool || budget > emma::kMaxBruteForceBudget || m < 1 ||
      budget < 1 || budget > m) {
    throw emma::ConfigError(fmt::format(
        "brute-force size guard: need 1 <= budget <= m, m <= {}, budget <= {} (got m={}, budget={})",
        emma::kMaxBruteForcePool, emma::kMaxBruteForceBudget, m, budget));
  }
  const emma::BruteForceProblem problem = emma::make_tiny_instance(m, seed);
  const emma::EnumerationReport r = emma::optimal_session(problem, budget);
  std::cout << fmt::format(
      "m={} budget={} seed={}\n"
      "  sequences enumerated: {}\n"
      "  optimal objective:    {:.6f}  sequence [{}]\n"
      "  greedy objective:     {:.6f}  sequence [{}]\n"
      "  greedy / optimal:     {:.6f}\n",
      r.m, r.budget, seed, r.count_enumerated, r.best_objective, join_ids(r.best_sequence),
      r.greedy_objective, join_ids(r.greedy_sequence), r.ratio);
  std::cout << "m,budget,seed,count_enumerated,best_objective,best_sequence,greedy_objective,ratio\n";
  std::cout << fmt::format("{},{},{},{},{},{},{},{}\n", r.m, r.budget, seed, r.count_enumerated,
                           r.best_objective, join_ids(r.best_sequence), r.greedy_objective,
                           r.ratio);
  if (r.ratio < 0.5) {
    std::cerr << fmt::format("error: greedy ratio {} is below 1/2\n", r.ratio);
    return kExitInvariant;
  }
  return 0;
}

int cmd_report(const std::string& results_path, const std::string& out_path) {
  std::ifstream in(results_path);
  if (!in) throw emma::DataError(fmt::format("cannot open results '{}'", results_path));
  const auto records = emma::read_results_csv(in);
  const auto rows = emma::aggregate(records);
  auto out = open_output(out_path);
  emma::write_aggregate_csv(out, rows);
  std::cout << emma::format_summary(rows);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Memory-aware active learning simulator"};
  app.require_subcommand(1, 1);

  std::string spec_path, out_path, config_path, curves_path, results_path;
  unsigned jobs = 0;
  std::size_t m = 0, budget = 0;
  std::uint64_t seed = 1;

  auto* generate = app.add_subcommand("generate", "Write a synthetic dataset CSV");
  generate->add_option("--spec", spec_path, "Config file with a [synthetic] section")->required();
  generate->add_option("--out", out_path, "Output dataset CSV")->required();

  auto* run = app.add_subcommand("run", "Run an experiment sweep");
  run->add_option("--config", config_path, "Experiment config file")->required();
  run->add_option("--out", out_path, "Results CSV")->required();
  run->add_option("--curves", curves_path, "Optional per-query accuracy curve CSV");
  run->add_option("--jobs", jobs, "Worker threads (0 = all processors)");

  auto* brute = app.add_subcommand("bruteforce", "Exhaustive optimum vs greedy on a tiny instance");
  brute->add_option("--m", m, "Candidate pool size (<= 8)")->required();
  brute->add_option("--budget", budget, "Query budget (<= 3)")->required();
  auto* seed_opt = brute->add_option("--seed", seed, "Instance seed");

  auto* report = app.add_subcommand("report", "Aggregate a results CSV");
  report->add_option("--results", results_path, "Results CSV")->required();
  report->add_option("--out", out_path, "Aggregate CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*generate) return cmd_generate(spec_path, out_path);
    if (*run) return cmd_run(config_path, out_path, curves_path, jobs);
    if (*brute) {
      if (seed_opt->count() == 0) {
        if (auto env = seed_from_env()) seed = *env;
      }
      return cmd_bruteforce(m, budget, seed);
    }
    if (*report) return cmd_report(results_path, out_path);
  } catch (const emma::InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
