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
#include <set>

#include "emma/classifier.hpp"
#include "emma/error.hpp"
#include "emma/memory.hpp"
#include "emma/strategies.hpp"
#include "emma/synthetic.hpp"

using namespace emma;

namespace {

struct Setup {
  Pool train;
  Pool test;
  ActivityVocabulary vocab = ActivityVocabulary::numbered(2);
  MemoryModel memory{1.0};
  double query_time = 0.0;
};

Setup make_setup(std::uint64_t seed, std::size_t m = 200, double target = 0.1) {
  SyntheticSpec spec;
  spec.m = m;
  spec.seed = seed;
  spec.switch_prob = 0.3;
  const Pool pool = generate(spec);
  RngStream rng(derive_seed(seed, {1}));
  const PoolSplit split = split_pool(pool, spec.n_classes, 0.3, rng);
  const FeatureScaler scaler = FeatureScaler::fit(split.train);
  Setup s{scaler.transform(split.train), scaler.transform(split.test),
          ActivityVocabulary::numbered(spec.n_classes), MemoryModel(1.0), pool.max_timestamp()};
  s.memory = calibrate_strength(s.query_time - s.train.min_timestamp(), target);
  return s;
}

SessionOptions options_for(StrategyKind kind, std::size_t budget, const Setup& s,
                           std::uint64_t seed = 1) {
  SessionOptions o;
  o.kind = kind;
  o.budget = budget;
  o.query_time = s.query_time;
  o.oracle_seed = derive_seed(seed, {4});
  o.selection_seed = derive_seed(seed, {5});
  o.classifier.epochs = 100;
  return o;
}

// Independent two-class entropy for scores (x, -x).
double binary_entropy_of(double x) {
  const double p = 1.0 / (1.0 + std::exp(-2.0 * x));
  return -(p * std::log(p) + (1 - p) * std::log(1 - p));
}

}  // namespace

TEST_CASE("entropy identities") {
  CHECK(entropy(std::vector<double>{1.0, 0.0, 0.0}) == 0.0);
  for (std::size_t n = 2; n <= 10; ++n) {
    CHECK(std::abs(entropy(std::vector<double>(n, 1.0 / n)) - std::log(n)) < 1e-12);
  }
  CHECK(std::abs(entropy(std::vector<double>{0.75, 0.25}) - 0.562335) < 1e-6);
  CHECK_THROWS_AS(entropy(std::vector<double>{0.5, 0.6}), std::invalid_argument);
  CHECK_THROWS_AS(entropy(std::vector<double>{1.5, -0.5}), std::invalid_argument);
}

TEST_CASE("gain per strategy") {
  CHECK(gain(StrategyKind::kEmma, 0.8, 0.5).gain == doctest::Approx(0.4));
  CHECK(gain(StrategyKind::kEma, 0.8, 0.5).gain == 0.8);
  CHECK(gain(StrategyKind::kMma, 0.8, 0.5).gain == 0.5);
  CHECK(gain(StrategyKind::kUb, 0.8, 0.5).gain == 0.8);
}

TEST_CASE("EMMA gain never exceeds EMA gain; equal only without forgetting") {
  RngStream rng(8);
  for (int i = 0; i < 500; ++i) {
    const double e = std::log(6.0) * rng.uniform01();
    const double r = rng.uniform01();
    CHECK(gain(StrategyKind::kEmma, e, r).gain <= gain(StrategyKind::kEma, e, r).gain);
    CHECK(gain(StrategyKind::kEmma, e, 1.0).gain == gain(StrategyKind::kEma, e, 1.0).gain);
  }
}

TEST_CASE("scaling every retention keeps the EMMA argmax") {
  RngStream rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> e(12), r(12);
    for (std::size_t i = 0; i < 12; ++i) {
      e[i] = rng.uniform01();
      r[i] = rng.uniform01();
    }
    const double c = 0.01 + rng.uniform01();
    std::size_t a = 0, b = 0;
    for (std::size_t i = 1; i < 12; ++i) {
      if (gain(StrategyKind::kEmma, e[i], r[i]).gain > gain(StrategyKind::kEmma, e[a], r[a]).gain) a = i;
      if (gain(StrategyKind::kEmma, e[i], c * r[i]).gain >
          gain(StrategyKind::kEmma, e[b], c * r[b]).gain) {
        b = i;
      }
    }
    CHECK(a == b);
  }
}

TEST_CASE("strategy names") {
  CHECK(parse_strategy("EMMA") == StrategyKind::kEmma);
  CHECK(to_string(StrategyKind::kLb) == "lb");
  try {
    parse_strategy("random");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    for (const char* name : {"emma", "ema", "mma", "ub", "lb"}) {
      CHECK(msg.find(name) != std::string::npos);
    }
  }
  CHECK(default_oracle_mode(StrategyKind::kUb) == OracleMode::kPerfect);
  CHECK(default_oracle_mode(StrategyKind::kEmma) == OracleMode::kSimulated);
}

TEST_CASE("three-observation gain table: each strategy picks its own argmax") {
  // Scores (x, -x); query at t = 10 with s = 5.
  const SoftmaxClassifier model(2, 1, {1.0, 0.0, -1.0, 0.0});
  const MemoryModel memory(5.0);
  const Pool pool({Observation{{0.0}, 2.0, 0, 0, 0}, Observation{{0.5}, 5.0, 0, 0, 1},
                   Observation{{2.0}, 10.0, 0, 0, 2}},
                  1);
  // Frozen values, cross-checked against the closed form below.
  const double e[3] = {0.693147, 0.582203, 0.090095};
  const double r[3] = {0.201897, 0.367879, 1.0};
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(std::abs(binary_entropy_of(pool[i].features[0]) - e[i]) < 1e-5);
    CHECK(std::abs(std::exp(-(10.0 - pool[i].timestamp) / 5.0) - r[i]) < 1e-5);
  }
  // EMMA products: 0.139945, 0.214181, 0.090095.
  RngStream rng(0);
  CHECK(select_next(StrategyKind::kEmma, pool, model, memory, 10.0, rng).id == 1);
  CHECK(select_next(StrategyKind::kEma, pool, model, memory, 10.0, rng).id == 0);
  CHECK(select_next(StrategyKind::kUb, pool, model, memory, 10.0, rng).id == 0);
  CHECK(select_next(StrategyKind::kMma, pool, model, memory, 10.0, rng).id == 2);
  const Selection s = select_next(StrategyKind::kEmma, pool, model, memory, 10.0, rng);
  CHECK(std::abs(s.score.gain - 0.214181) < 1e-5);
}

TEST_CASE("MMA prefers the higher retention of two") {
  const SoftmaxClassifier model(2, 1);
  const MemoryModel memory(1.0);
  // Retentions 0.5 and 0.7.
  const double tq = 10.0;
  const Pool pool({Observation{{0.0}, tq - std::log(2.0), 0, 0, 0},
                   Observation{{0.0}, tq + std::log(0.7), 0, 0, 1}},
                  1);
  RngStream rng(0);
  CHECK(select_next(StrategyKind::kMma, pool, model, memory, tq, rng).id == 1);
}

TEST_CASE("ties go to the larger timestamp, then the smaller id") {
  const SoftmaxClassifier model(2, 1);  // uniform everywhere: equal entropy
  const MemoryModel memory(1.0);
  RngStream rng(0);
  const Pool pool({Observation{{0.0}, 10.0, 0, 0, 5}, Observation{{1.0}, 20.0, 0, 0, 3}}, 1);
  CHECK(select_next(StrategyKind::kEma, pool, model, memory, 30.0, rng).id == 3);
  const Pool same({Observation{{0.0}, 20.0, 0, 0, 8}, Observation{{1.0}, 20.0, 0, 0, 4}}, 1);
  CHECK(select_next(StrategyKind::kEma, same, model, memory, 30.0, rng).id == 4);
}

TEST_CASE("session trace invariants across strategies") {
  const Setup s = make_setup(3);
  for (StrategyKind kind : kAllStrategies) {
    const SessionTrace t = run_session(options_for(kind, 25, s), s.train, s.test, s.vocab,
                                       s.memory, 2, 77);
    CHECK(t.queries() == 25);
    CHECK_FALSE(t.truncated);
    CHECK(t.accuracy_curve.size() == 25);
    CHECK(t.labeled.size() == 27);
    std::set<ObservationId> ids;
    for (const auto& e : t.labeled.entries()) CHECK(ids.insert(e.observation.id).second);
    for (double a : t.accuracy_curve) {
      CHECK(a >= 0.0);
      CHECK(a <= 1.0);
    }
    CHECK(t.final_accuracy == t.accuracy_curve.back());
    for (std::size_t i = 1; i < t.cumulative_objective.size(); ++i) {
      CHECK(t.cumulative_objective[i] >= t.cumulative_objective[i - 1]);
    }
    for (std::size_t i = 0; i < t.queries(); ++i) {
      const auto& entry = t.labeled.entries()[2 + i];
      CHECK(entry.was_correct == (entry.assigned_label == entry.observation.true_label));
    }
    if (kind == StrategyKind::kUb) CHECK(t.noisy_fraction() == 0.0);
  }
}

TEST_CASE("MMA queries in order of recency") {
  const Setup s = make_setup(5);
  const SessionTrace t =
      run_session(options_for(StrategyKind::kMma, 30, s), s.train, s.test, s.vocab, s.memory, 2, 1);
  std::vector<double> times;
  for (std::size_t i = 2; i < t.labeled.size(); ++i) {
    times.push_back(t.labeled.entries()[i].observation.timestamp);
  }
  for (std::size_t i = 1; i < times.size(); ++i) CHECK(times[i] < times[i - 1]);
}

TEST_CASE("EMMA with perfect memory queries exactly like EMA") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const Setup s = make_setup(seed);
    const MemoryModel perfect = MemoryModel::perfect();
    auto a = options_for(StrategyKind::kEmma, 20, s, seed);
    auto b = options_for(StrategyKind::kEma, 20, s, seed);
    const auto ta = run_session(a, s.train, s.test, s.vocab, perfect, 2, seed);
    const auto tb = run_session(b, s.train, s.test, s.vocab, perfect, 2, seed);
    CHECK(ta.query_order == tb.query_order);
  }
}

TEST_CASE("budget 0 evaluates the initial model only") {
  const Setup s = make_setup(2);
  const SessionTrace t =
      run_session(options_for(StrategyKind::kEmma, 0, s), s.train, s.test, s.vocab, s.memory, 2, 3);
  CHECK(t.queries() == 0);
  CHECK(t.accuracy_curve.empty());
  CHECK(t.final_accuracy == t.initial_accuracy);
  CHECK(t.noisy_fraction() == 0.0);
}

TEST_CASE("budget beyond the pool truncates; UB exhausting the pool equals a full fit") {
  const Setup s = make_setup(4, 60);
  auto o = options_for(StrategyKind::kUb, 1000, s);
  const SessionTrace t = run_session(o, s.train, s.test, s.vocab, s.memory, 2, 9);
  CHECK(t.truncated);
  CHECK(t.queries() == s.train.size() - 2);
  CHECK(t.noisy_fraction() == 0.0);

  LabeledSet all;
  for (const auto& obs : s.train) all.add(obs, obs.true_label, true);
  const double full = accuracy(fit(all, s.vocab, o.classifier), s.test);
  // Same multiset of examples; only the summation order differs.
  CHECK(std::abs(t.final_accuracy - full) <= 1.0 / static_cast<double>(s.test.size()) + 1e-12);
}

TEST_CASE("LB is reproducible per selection seed") {
  const Setup s = make_setup(6);
  auto o = options_for(StrategyKind::kLb, 15, s);
  const auto a = run_session(o, s.train, s.test, s.vocab, s.memory, 2, 1);
  const auto b = run_session(o, s.train, s.test, s.vocab, s.memory, 2, 1);
  CHECK(a.query_order == b.query_order);
  o.selection_seed += 1;
  const auto c = run_session(o, s.train, s.test, s.vocab, s.memory, 2, 1);
  CHECK(a.query_order != c.query_order);
}

TEST_CASE("was_correct flags never influence selection") {
  const Setup s = make_setup(7);
  RngStream rng(5);
  const LabeledSet init = draw_initial_labels(s.train, 4, rng);
  LabeledSet flipped;
  for (const auto& e : init.entries()) flipped.add(e.observation, e.assigned_label, !e.was_correct);
  const auto o = options_for(StrategyKind::kEmma, 20, s);
  const auto a = run_session(o, s.train, s.test, s.vocab, s.memory, init);
  const auto b = run_session(o, s.train, s.test, s.vocab, s.memory, flipped);
  CHECK(a.query_order == b.query_order);
  CHECK(a.final_accuracy == b.final_accuracy);
}

TEST_CASE("empty initial set starts from the uniform model") {
  const Setup s = make_setup(8);
  const auto t = run_session(options_for(StrategyKind::kEmma, 5, s), s.train, s.test, s.vocab,
                             s.memory, LabeledSet{});
  CHECK(t.queries() == 5);
  CHECK(t.labeled.size() == 5);
}
