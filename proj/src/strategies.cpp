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

#include "emma/strategies.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>

#include <fmt/core.h>

#include "emma/error.hpp"

namespace emma {

std::string_view to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::kEmma: return "emma";
    case StrategyKind::kEma: return "ema";
    case StrategyKind::kMma: return "mma";
    case StrategyKind::kUb: return "ub";
    case StrategyKind::kLb: return "lb";
  }
  return "?";
}

StrategyKind parse_strategy(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (StrategyKind k : kAllStrategies) {
    if (to_string(k) == lower) return k;
  }
  throw ConfigError(
      fmt::format("unknown strategy '{}' (valid: emma, ema, mma, ub, lb)", name));
}

OracleMode default_oracle_mode(StrategyKind kind) {
  return kind == StrategyKind::kUb ? OracleMode::kPerfect : OracleMode::kSimulated;
}

double entropy(std::span<const double> dist) {
  if (dist.empty()) throw std::invalid_argument("entropy of an empty distribution");
  double total = 0.0;
  double h = 0.0;
  for (double p : dist) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw std::invalid_argument(fmt::format("invalid probability {}", p));
    }
    total += p;
    if (p > 0.0) h -= p * std::log(p);
  }
  if (std::abs(total - 1.0) > 1e-6) {
    throw std::invalid_argument(fmt::format("probabilities sum to {}, not 1", total));
  }
  return std::max(h, 0.0);
}

GainScore gain(StrategyKind kind, double entropy_val, double retention_val) {
  switch (kind) {
    case StrategyKind::kEmma:
    case StrategyKind::kLb:
      return {entropy_val, retention_val, entropy_val * retention_val};
    case StrategyKind::kEma:
    case StrategyKind::kUb:
      return {entropy_val, 1.0, entropy_val};
    case StrategyKind::kMma:
      return {1.0, retention_val, retention_val};
  }
  return {};
}

Selection select_next(StrategyKind kind, const Pool& pool_view, const SoftmaxClassifier& model,
                      const MemoryModel& memory, double query_time, RngStream& rng) {
  return select_next(kind, std::span<const Observation>(pool_view.observations()), model,
                     memory, query_time, rng);
}

Selection select_next(StrategyKind kind, std::span<const Observation> pool_view,
                      const SoftmaxClassifier& model, const MemoryModel& memory,
                      double query_time, RngStream& rng) {
  if (pool_view.empty()) throw std::invalid_argument("cannot select from an empty pool");

  std::vector<double> p(model.n_classes());
  auto objective_terms = [&](const Observation& obs) {
    model.predict_proba_into(obs.features, p);
    const double e = entropy(p);
    const double r = retention(memory, query_time - obs.timestamp);
    return GainScore{e, r, e * r};
  };

  if (kind == StrategyKind::kLb) {
    const auto pos = static_cast<std::size_t>(rng.uniform_index(pool_view.size()));
    return {pos, pool_view[pos].id, objective_terms(pool_view[pos])};
  }

  std::size_t best = 0;
  double best_gain = -1.0;
  GainScore best_terms;
  for (std::size_t i = 0; i < pool_view.size(); ++i) {
    const Observation& obs = pool_view[i];
    const GainScore terms = objective_terms(obs);
    const double g = gain(kind, terms.entropy_term, terms.retention_term).gain;
    bool better = g > best_gain;
    if (!better && g == best_gain) {
      const Observation& cur = pool_view[best];
      better = obs.timestamp > cur.timestamp ||
               (obs.timestamp == cur.timestamp && obs.id < cur.id);
    }
    if (better) {
      best = i;
      best_gain = g;
      best_terms = terms;
    }
  }
  return {best, pool_view[best].id, best_terms};
}

double SessionTrace::noisy_fraction() const {
  if (labels_received.empty()) return 0.0;
  const auto wrong = std::count_if(labels_received.begin(), labels_received.end(),
                                   [](const QueryResponse& r) { return !r.was_correct; });
  return static_cast<double>(wrong) / static_cast<double>(labels_received.size());
}

namespace {

SoftmaxClassifier refit(const LabeledSet& labeled, const ActivityVocabulary& vocabulary,
                        std::size_t dimension, const ClassifierParams& params) {
  if (labeled.empty()) return SoftmaxClassifier(vocabulary.size(), dimension);
  return fit(labeled, vocabulary, params);
}

}  // namespace

SessionTrace run_session(const SessionOptions& options, const Pool& train, const Pool& test,
                         const ActivityVocabulary& vocabulary, const MemoryModel& memory,
                         const LabeledSet& initial) {
  options.classifier.validate();
  train.validate_labels(vocabulary.size());
  test.validate_labels(vocabulary.size());
  if (!train.empty() && options.query_time < train.max_timestamp()) {
    throw std::invalid_argument(fmt::format("query time {} precedes the latest observation at {}",
                                            options.query_time, train.max_timestamp()));
  }

  const OracleMode mode = options.oracle_mode.value_or(default_oracle_mode(options.kind));
  SimulatedOracle oracle(memory, vocabulary.size(), options.query_time, options.oracle_seed);
  RngStream selection_rng(options.selection_seed);

  const auto initial_ids = initial.ids();
  std::vector<Observation> remaining = train.without(initial_ids).observations();

  SessionTrace trace;
  trace.kind = options.kind;
  trace.labeled = initial;
  SoftmaxClassifier model =
      refit(trace.labeled, vocabulary, train.dimension(), options.classifier);
  trace.initial_accuracy = test.empty() ? 0.0 : accuracy(model, test);
  trace.final_accuracy = trace.initial_accuracy;

  double running = 0.0;
  for (std::size_t step = 0; step < options.budget; ++step) {
    if (remaining.empty()) {
      trace.truncated = true;
      break;
    }
    const Selection pick = select_next(options.kind, std::span<const Observation>(remaining),
                                       model, memory, options.query_time, selection_rng);
    Observation chosen = std::move(remaining[pick.position]);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pick.position));

    const QueryResponse response = mode == OracleMode::kPerfect
                                       ? answer_perfect(vocabulary, chosen)
                                       : oracle.answer(chosen);
    running += pick.score.gain;
    trace.query_order.push_back(chosen.id);
    trace.labels_received.push_back(response);
    trace.selected_scores.push_back(pick.score);
    trace.cumulative_objective.push_back(running);
    trace.labeled.add(std::move(chosen), response.label, response.was_correct);

    model = refit(trace.labeled, vocabulary, train.dimension(), options.classifier);
    const bool last = step + 1 == options.budget || remaining.empty();
    if (!test.empty() && (options.record_accuracy_curve || last)) {
      const double acc = accuracy(model, test);
      if (options.record_accuracy_curve) trace.accuracy_curve.push_back(acc);
      trace.final_accuracy = acc;
    }
  }
  return trace;
}

SessionTrace run_session(const SessionOptions& options, const Pool& train, const Pool& test,
                         const ActivityVocabulary& vocabulary, const MemoryModel& memory,
                         std::size_t init_k, std::uint64_t init_seed) {
  RngStream rng(init_seed);
  const LabeledSet initial = draw_initial_labels(train, init_k, rng);
  return run_session(options, train, test, vocabulary, memory, initial);
}

}  // namespace emma
