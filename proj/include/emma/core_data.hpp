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

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "emma/rng.hpp"

namespace emma {

using ActivityIndex = std::size_t;
using ObservationId = std::int64_t;

/// Fixed, ordered set of activity names. Declared up front so the classifier
/// can emit a full distribution over classes it has not seen yet.
class ActivityVocabulary {
 public:
  explicit ActivityVocabulary(std::vector<std::string> names);

  // Vocabulary "0".."n-1"; used by the synthetic generator.
  static ActivityVocabulary numbered(std::size_t n);

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(ActivityIndex index) const { return names_.at(index); }
  ActivityIndex index_of(std::string_view name) const;

 private:
  std::vector<std::string> names_;
};

/// One timestamped feature vector. `true_label` is read only by the oracle
/// and the evaluator, never by selection strategies or the classifier fit.
struct Observation {
  std::vector<double> features;
  double timestamp = 0.0;
  ActivityIndex true_label = 0;
  std::int64_t subject = 0;
  ObservationId id = 0;
};

/// Ordered collection of observations sharing one feature dimension, with
/// non-decreasing timestamps. Immutable after construction.
class Pool {
 public:
  Pool() = default;
  // Throws DataError if the invariants do not hold.
  Pool(std::vector<Observation> observations, std::size_t dimension);

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return observations_.size(); }
  bool empty() const { return observations_.empty(); }
  const std::vector<Observation>& observations() const { return observations_; }
  const Observation& operator[](std::size_t i) const { return observations_[i]; }
  auto begin() const { return observations_.begin(); }
  auto end() const { return observations_.end(); }

  double min_timestamp() const;
  double max_timestamp() const;

  // Copy of the pool without the observations whose id is in `ids`.
  Pool without(std::span<const ObservationId> ids) const;

  // Checks every label against a vocabulary of size n.
  void validate_labels(std::size_t n) const;

 private:
  std::vector<Observation> observations_;
  std::size_t dimension_ = 0;
};

struct LabeledEntry {
  Observation observation;
  ActivityIndex assigned_label = 0;
  bool was_correct = true;  // instrumentation only
};

/// Labeled set grown by a single session.
class LabeledSet {
 public:
  LabeledSet() = default;

  void add(Observation observation, ActivityIndex assigned_label, bool was_correct);
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::vector<LabeledEntry>& entries() const { return entries_; }
  std::vector<ObservationId> ids() const;

 private:
  std::vector<LabeledEntry> entries_;
};

struct PoolSplit {
  Pool train;
  Pool test;
};

/// Stratified split by true label. Per-class test counts use largest-remainder
/// rounding so the total test size equals round(m * test_fraction) whenever
/// each class can keep one observation on each side.
PoolSplit split_pool(const Pool& pool, std::size_t n_classes, double test_fraction,
                     RngStream& rng);

/// Draws k observations uniformly without replacement, labeled with their
/// true label. Callers remove them from the active pool with Pool::without.
LabeledSet draw_initial_labels(const Pool& train, std::size_t k, RngStream& rng);

/// Samples k distinct indices from [0, n) by partial Fisher-Yates.
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k,
                                                    RngStream& rng);

}  // namespace emma
