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

#include "emma/core_data.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

#include <fmt/core.h>

#include "emma/error.hpp"

namespace emma {

ActivityVocabulary::ActivityVocabulary(std::vector<std::string> names)
    : names_(std::move(names)) {
  if (names_.size() < 2) {
    throw ConfigError(fmt::format(
        "activity vocabulary needs at least 2 activities, got {}", names_.size()));
  }
  std::unordered_set<std::string> seen;
  for (const auto& name : names_) {
    if (!seen.insert(name).second) {
      throw ConfigError(fmt::format("duplicate activity name '{}'", name));
    }
  }
}

ActivityVocabulary ActivityVocabulary::numbered(std::size_t n) {
  std::vector<std::string> names;
  names.reserve(n);
  for (std::size_t i = 0; i < n; ++i) names.push_back(std::to_string(i));
  return ActivityVocabulary(std::move(names));
}

ActivityIndex ActivityVocabulary::index_of(std::string_view name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) {
    throw DataError(fmt::format("unknown activity '{}'", name));
  }
  return static_cast<ActivityIndex>(it - names_.begin());
}

Pool::Pool(std::vector<Observation> observations, std::size_t dimension)
    : observations_(std::move(observations)), dimension_(dimension) {
  double previous = 0.0;
  for (std::size_t i = 0; i < observations_.size(); ++i) {
    const Observation& obs = observations_[i];
    if (obs.features.size() != dimension_) {
      throw DataError(fmt::format("observation {} has dimension {}, expected {}",
                                  obs.id, obs.features.size(), dimension_));
    }
    for (double f : obs.features) {
      if (!std::isfinite(f)) {
        throw DataError(fmt::format("observation {} has a non-finite feature", obs.id));
      }
    }
    if (!std::isfinite(obs.timestamp) || obs.timestamp < 0.0) {
      throw DataError(fmt::format("observation {} has invalid timestamp {}", obs.id,
                                  obs.timestamp));
    }
    if (i > 0 && obs.timestamp < previous) {
      throw DataError(fmt::format(
          "pool timestamps must be non-decreasing (observation {} at {} after {})",
          obs.id, obs.timestamp, previous));
    }
    previous = obs.timestamp;
  }
}

double Pool::min_timestamp() const {
  if (empty()) throw DataError("min_timestamp of an empty pool");
  return observations_.front().timestamp;
}

double Pool::max_timestamp() const {
  if (empty()) throw DataError("max_timestamp of an empty pool");
  return observations_.back().timestamp;
}

Pool Pool::without(std::span<const ObservationId> ids) const {
  std::unordered_set<ObservationId> drop(ids.begin(), ids.end());
  std::vector<Observation> kept;
  kept.reserve(observations_.size());
  for (const auto& obs : observations_) {
    if (!drop.contains(obs.id)) kept.push_back(obs);
  }
  return Pool(std::move(kept), dimension_);
}

void Pool::validate_labels(std::size_t n) const {
  for (const auto& obs : observations_) {
    if (obs.true_label >= n) {
      throw DataError(fmt::format("observation {} has label {} outside [0, {})", obs.id,
                                  obs.true_label, n));
    }
  }
}

void LabeledSet::add(Observation observation, ActivityIndex assigned_label,
                     bool was_correct) {
  entries_.push_back({std::move(observation), assigned_label, was_correct});
}

std::vector<ObservationId> LabeledSet::ids() const {
  std::vector<ObservationId> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.observation.id);
  return out;
}

std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k,
                                                    RngStream& rng) {
  if (k > n) {
    throw std::invalid_argument(
        fmt::format("cannot sample {} items without replacement from {}", k, n));
  }
  std::vector<std::size_t> index(n);
  std::iota(index.begin(), index.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.uniform_index(n - i));
    std::swap(index[i], index[j]);
  }
  index.resize(k);
  return index;
}

PoolSplit split_pool(const Pool& pool, std::size_t n_classes, double test_fraction,
                     RngStream& rng) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw std::invalid_argument(
        fmt::format("test_fraction must lie in (0, 1), got {}", test_fraction));
  }
  pool.validate_labels(n_classes);

  std::vector<std::vector<std::size_t>> by_class(n_classes);
  for (std::size_t i = 0; i < pool.size(); ++i) by_class[pool[i].true_label].push_back(i);
  for (std::size_t c = 0; c < n_classes; ++c) {
    if (by_class[c].empty()) throw DataError(fmt::format("class {} has no observations", c));
    if (by_class[c].size() < 2) {
      throw DataError(fmt::format("class {} has fewer than 2 observations", c));
    }
  }

  // Largest-remainder allocation of the test total across classes, keeping at
  // least one observation of every class on each side.
  const auto total_test = static_cast<std::size_t>(
      std::llround(static_cast<double>(pool.size()) * test_fraction));
  std::vector<std::size_t> quota(n_classes);
  std::vector<double> remainder(n_classes);
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < n_classes; ++c) {
    const double exact = static_cast<double>(by_class[c].size()) * test_fraction;
    quota[c] = std::clamp<std::size_t>(static_cast<std::size_t>(std::floor(exact)), 1,
                                       by_class[c].size() - 1);
    remainder[c] = exact - std::floor(exact);
    assigned += quota[c];
  }
  std::vector<std::size_t> order(n_classes);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t c : order) {
    if (assigned >= total_test) break;
    if (quota[c] + 1 < by_class[c].size()) {
      ++quota[c];
      ++assigned;
    }
  }

  std::vector<bool> in_test(pool.size(), false);
  for (std::size_t c = 0; c < n_classes; ++c) {
    for (std::size_t pick : sample_without_replacement(by_class[c].size(), quota[c], rng)) {
      in_test[by_class[c][pick]] = true;
    }
  }
  std::vector<Observation> train;
  std::vector<Observation> test;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    (in_test[i] ? test : train).push_back(pool[i]);
  }
  return {Pool(std::move(train), pool.dimension()), Pool(std::move(test), pool.dimension())};
}

LabeledSet draw_initial_labels(const Pool& train, std::size_t k, RngStream& rng) {
  if (k > train.size()) {
    throw DataError(fmt::format("cannot draw {} initial labels from a pool of {}", k,
                                train.size()));
  }
  LabeledSet labeled;
  for (std::size_t i : sample_without_replacement(train.size(), k, rng)) {
    labeled.add(train[i], train[i].true_label, true);
  }
  return labeled;
}

}  // namespace emma
