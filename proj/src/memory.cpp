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

#include "emma/memory.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/core.h>

#include "emma/error.hpp"

namespace emma {

MemoryModel::MemoryModel(double strength_s) : strength_(strength_s) {
  if (!(strength_s > 0.0) || !std::isfinite(strength_s)) {
    throw std::invalid_argument(
        fmt::format("memory strength must be positive and finite, got {}", strength_s));
  }
}

MemoryModel MemoryModel::perfect() {
  MemoryModel m;
  m.strength_ = std::numeric_limits<double>::infinity();
  m.perfect_ = true;
  return m;
}

void RetentionLevel::validate() const {
  if (name.empty()) throw ConfigError("retention level needs a name");
  if (!(target_low > 0.0 && target_low < 1.0)) {
    throw ConfigError(fmt::format("retention level {}: target_low must lie in (0, 1), got {}",
                                  name, target_low));
  }
}

double retention(const MemoryModel& model, double delta_t) {
  if (!(delta_t >= 0.0)) {
    throw std::invalid_argument(
        fmt::format("query precedes observation (negative lag {})", delta_t));
  }
  if (model.is_perfect()) return 1.0;
  return std::exp(-delta_t / model.strength());
}

MemoryModel calibrate_strength(double delta_t_ref, double target_retention) {
  if (!(delta_t_ref > 0.0) || !std::isfinite(delta_t_ref)) {
    throw std::invalid_argument(
        fmt::format("reference lag must be positive, got {}", delta_t_ref));
  }
  if (!(target_retention > 0.0 && target_retention < 1.0)) {
    throw std::invalid_argument(fmt::format(
        "target retention must lie strictly inside (0, 1), got {}", target_retention));
  }
  return MemoryModel(-delta_t_ref / std::log(target_retention));
}

RetentionRange retention_range(const Pool& pool, double t_q, const MemoryModel& model) {
  if (pool.empty()) throw DataError("retention range of an empty pool");
  if (t_q < pool.max_timestamp()) {
    throw std::invalid_argument(fmt::format(
        "query time {} precedes the latest observation at {}", t_q, pool.max_timestamp()));
  }
  return {retention(model, t_q - pool.min_timestamp()),
          retention(model, t_q - pool.max_timestamp())};
}

}  // namespace emma
