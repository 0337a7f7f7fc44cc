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

#include <string>
#include <utility>

#include "emma/core_data.hpp"

namespace emma {

/// Ebbinghaus forgetting curve R(dt) = exp(-dt / s). Strength is in the same
/// time unit as observation timestamps.
class MemoryModel {
 public:
  explicit MemoryModel(double strength_s);

  // The s -> infinity limit: retention is exactly 1 at every lag.
  static MemoryModel perfect();

  double strength() const { return strength_; }
  bool is_perfect() const { return perfect_; }

 private:
  MemoryModel() = default;

  double strength_ = 0.0;
  bool perfect_ = false;
};

/// A named retention level, set by its target retention at the pool's maximum
/// lag. The upper end of the observed range follows from the minimum lag.
struct RetentionLevel {
  std::string name;
  double target_low = 0.1;

  void validate() const;
};

/// exp(-delta_t / s). Throws std::invalid_argument for negative lag.
double retention(const MemoryModel& model, double delta_t);

/// Strength giving `target_retention` at lag `delta_t_ref`:
/// s = -delta_t_ref / ln(target_retention).
MemoryModel calibrate_strength(double delta_t_ref, double target_retention);

struct RetentionRange {
  double low;
  double high;
};

/// Retention at the pool's largest and smallest lag relative to t_q.
RetentionRange retention_range(const Pool& pool, double t_q, const MemoryModel& model);

}  // namespace emma
