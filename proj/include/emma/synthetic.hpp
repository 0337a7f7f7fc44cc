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
#include <vector>

#include "emma/core_data.hpp"

namespace emma {

struct SyntheticSpec {
  std::size_t n_classes = 6;
  std::size_t d = 6;
  std::size_t m = 600;
  double class_separation = 4.0;  // minimum distance between class means
  double noise_sigma = 1.0;
  double switch_prob = 0.05;      // per-step probability the activity changes
  double dt = 1.0;                // seconds between observations
  std::uint64_t seed = 1;

  void validate() const;
};

/// Class means at fixed points with minimum pairwise distance
/// class_separation: scaled unit vectors when d >= n, a regular polygon in the
/// first two coordinates when 2 <= d < n, and evenly spaced points when d = 1.
std::vector<std::vector<double>> class_means(const SyntheticSpec& spec);

/// Gaussian blobs visited by a Markov activity sequence. Observation i has
/// timestamp i * dt, subject 0 and id i. On a switch the next activity is
/// uniform over the other classes, so the stationary distribution is uniform.
Pool generate(const SyntheticSpec& spec);

}  // namespace emma
