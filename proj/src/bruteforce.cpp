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

#include "emma/bruteforce.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include <fmt/core.h>

#include "emma/error.hpp"
#include "emma/synthetic.hpp"

namespace emma {
namespace {

constexpr std::uint64_t kCountLimit = std::uint64_t{1} << 62;

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b, std::uint64_t m, std::uint64_t budget) {
  if (a != 0 && b > (kCountLimit - 1) / a) {
    throw std::overflow_error(fmt::format(
        "ordered-subset count for m={} B={} exceeds 2^62; use a smaller m or budget", m, budget));
  }
  return a * b;
}

void check_counting_args(std::uint64_t m, std::uint64_t budget) {
  if (m < 1 || budget < 1) throw std::invalid_argument("m and budget must both be >= 1");
  if (budget > m) {
    throw std::invalid_argument(fmt::format("budget {} exceeds pool size {}", budget, m));
  }
}

struct Enumerator {
  const BruteForceProblem& problem;
  std::size_t budget;
  std::uint64_t visited = 0;
  double best_objective = -1.0;
  std::vector<ObservationId> best_sequence;

  void consider(double objective, const std::vector<ObservationId>& sequence) {
    ++visited;
    if (objective > best_objective ||
        (objective == best_objective && sequence < best_sequence)) {
      best_objective = objective;
      best_sequence = sequence;
    }
  }

  // Depth-first over ordered subsets; every node is one sequence.
  void expand(const std::vector<Observation>& candidates, std::vector<bool>& used,
              LabeledSet& labeled, const SoftmaxClassifier& model,
              std::vector<ObservationId>& sequence, double objective) {
    if (sequence.size() == budget) return;
    std::vector<double> p(model.n_classes());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (used[i]) continue;
      const Observation& obs = candidates[i];
      model.predict_proba_into(obs.features, p);
      const double g =
          entropy(p) * retention(problem.memory, problem.query_time - obs.timestamp);
      const QueryResponse response = answer_perfect(problem.vocabulary, obs);

      LabeledSet next = labeled;
      next.add(obs, response.label, response.was_correct);
      sequence.push_back(obs.id);
      used[i] = true;
      consider(objective + g, sequence);
      if (sequence.size() < budget) {
        const SoftmaxClassifier refit = fit(next, problem.vocabulary, problem.classifier);
        expand(candidates, used, next, refit, sequence, objective + g);
      }
      used[i] = false;
      sequence.pop_back();
    }
  }
};

}  // namespace

std::uint64_t count_ordered_subsets(std::uint64_t m, std::uint64_t budget) {
  check_counting_args(m, budget);
  std::uint64_t total = 0;
  std::uint64_t term = 1;
  for (std::uint64_t b = 1; b <= budget; ++b) {
    term = checked_mul(term, m - b + 1, m, budget);
    total += term;
    if (total >= kCountLimit) {
      throw std::overflow_error(fmt::format(
          "ordered-subset count for m={} B={} exceeds 2^62; use a smaller m or budget", m,
          budget));
    }
  }
  return total;
}

GrowthApproximation verify_mB_approximation(std::uint64_t m, std::uint64_t budget) {
  GrowthApproximation out;
  out.exact = count_ordered_subsets(m, budget);
  out.approx = 1;
  for (std::uint64_t b = 0; b < budget; ++b) out.approx = checked_mul(out.approx, m, m, budget);
  const double diff = out.exact >= out.approx ? static_cast<double>(out.exact - out.approx)
                                              : static_cast<double>(out.approx - out.exact);
  out.relative_gap = diff / static_cast<double>(out.approx);
  return out;
}

EnumerationReport optimal_session(const BruteForceProblem& problem, std::size_t budget,
                                  OracleMode oracle_mode) {
  if (oracle_mode != OracleMode::kPerfect) {
    throw std::invalid_argument(
        "brute-force enumeration requires the perfect oracle (deterministic objective)");
  }
  const auto initial_ids = problem.initial.ids();
  const Pool candidates = problem.train.without(initial_ids);
  const std::size_t m = candidates.size();
  if (m > kMaxBruteForcePool || budget > kMaxBruteForceBudget) {
    throw std::invalid_argument(fmt::format(
        "brute-force instance too large (m={}, B={}); limits are m <= {} and B <= {}", m,
        budget, kMaxBruteForcePool, kMaxBruteForceBudget));
  }
  const std::uint64_t expected = count_ordered_subsets(m, budget);

  EnumerationReport report;
  report.m = m;
  report.budget = budget;

  const auto start = std::chrono::steady_clock::now();
  Enumerator enumerator{problem, budget, 0, -1.0, {}};
  LabeledSet labeled = problem.initial;
  const SoftmaxClassifier model = labeled.empty()
                                      ? SoftmaxClassifier(problem.vocabulary.size(), candidates.dimension())
                                      : fit(labeled, problem.vocabulary, problem.classifier);
  std::vector<bool> used(m, false);
  std::vector<ObservationId> sequence;
  enumerator.expand(candidates.observations(), used, labeled, model, sequence, 0.0);
  report.enumeration_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  report.count_enumerated = enumerator.visited;
  if (report.count_enumerated != expected) {
    throw InvariantViolation(fmt::format("enumerated {} sequences, closed form gives {}",
                                         report.count_enumerated, expected));
  }
  report.best_objective = enumerator.best_objective;
  report.best_sequence = enumerator.best_sequence;

  SessionOptions options;
  options.kind = StrategyKind::kEmma;
  options.budget = budget;
  options.query_time = problem.query_time;
  options.classifier = problem.classifier;
  options.oracle_mode = OracleMode::kPerfect;
  options.record_accuracy_curve = false;
  const SessionTrace greedy = run_session(options, problem.train, problem.test,
                                          problem.vocabulary, problem.memory, problem.initial);
  report.greedy_objective = greedy.total_objective();
  report.greedy_sequence = greedy.query_order;
  report.ratio = report.best_objective > 0.0 ? report.greedy_objective / report.best_objective
                                             : 1.0;
  return report;
}

BruteForceProblem make_tiny_instance(std::size_t m, std::uint64_t seed) {
  if (m < 1) throw std::invalid_argument("tiny instance needs m >= 1");
  SyntheticSpec spec;
  spec.n_classes = 3;
  spec.d = 2;
  spec.m = m + 2 + 40;
  spec.class_separation = 2.0;
  spec.noise_sigma = 1.0;
  spec.switch_prob = 0.3;
  spec.dt = 1.0;
  spec.seed = derive_seed(seed, {0});
  const Pool all = generate(spec);

  RngStream rng(derive_seed(seed, {1}));
  auto picks = sample_without_replacement(all.size(), m + 2, rng);
  std::vector<bool> chosen(all.size(), false);
  for (std::size_t i : picks) chosen[i] = true;

  LabeledSet initial;
  for (std::size_t k = 0; k < 2; ++k) initial.add(all[picks[k]], all[picks[k]].true_label, true);
  std::sort(picks.begin() + 2, picks.end());
  std::vector<Observation> candidates;
  for (auto it = picks.begin() + 2; it != picks.end(); ++it) candidates.push_back(all[*it]);
  std::vector<Observation> test;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (!chosen[i]) test.push_back(all[i]);
  }

  Pool train(std::move(candidates), spec.d);
  const double query_time = all.max_timestamp();
  const double max_lag = std::max(query_time - train.min_timestamp(), spec.dt);
  return BruteForceProblem{std::move(train),
                           Pool(std::move(test), spec.d),
                           ActivityVocabulary::numbered(spec.n_classes),
                           calibrate_strength(max_lag, 0.1),
                           query_time,
                           std::move(initial),
                           ClassifierParams{}};
}

}  // namespace emma
