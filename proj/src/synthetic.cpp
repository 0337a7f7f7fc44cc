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

#include "emma/synthetic.hpp"

#include <cmath>
#include <numbers>

#include <fmt/core.h>

#include "emma/error.hpp"
#include "emma/rng.hpp"

namespace emma {

void SyntheticSpec::validate() const {
  if (n_classes < 2) throw ConfigError(fmt::format("synthetic.n_classes must be >= 2, got {}", n_classes));
  if (d < 1) throw ConfigError("synthetic.d must be >= 1");
  if (m < 1) throw ConfigError("synthetic.m must be >= 1");
  if (!(class_separation > 0.0) || !std::isfinite(class_separation)) {
    throw ConfigError(
        fmt::format("synthetic.class_separation must be > 0, got {}", class_separation));
  }
  if (!(noise_sigma > 0.0) || !std::isfinite(noise_sigma)) {
    throw ConfigError(fmt::format("synthetic.noise_sigma must be > 0, got {}", noise_sigma));
  }
  if (!(switch_prob > 0.0 && switch_prob <= 1.0)) {
    throw ConfigError(fmt::format("synthetic.switch_prob must lie in (0, 1], got {}", switch_prob));
  }
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw ConfigError(fmt::format("synthetic.dt must be > 0, got {}", dt));
  }
}

std::vector<std::vector<double>> class_means(const SyntheticSpec& spec) {
  const std::size_t n = spec.n_classes;
  std::vector<std::vector<double>> means(n, std::vector<double>(spec.d, 0.0));
  if (spec.d >= n) {
    // Orthogonal axes: |a e_i - a e_j| = a sqrt(2).
    const double a = spec.class_separation / std::numbers::sqrt2;
    for (std::size_t c = 0; c < n; ++c) means[c][c] = a;
  } else if (spec.d >= 2) {
    const double step = 2.0 * std::numbers::pi / static_cast<double>(n);
    const double radius = spec.class_separation / (2.0 * std::sin(step / 2.0));
    for (std::size_t c = 0; c < n; ++c) {
      means[c][0] = radius * std::cos(step * static_cast<double>(c));
      means[c][1] = radius * std::sin(step * static_cast<double>(c));
    }
  } else {
    for (std::size_t c = 0; c < n; ++c) means[c][0] = spec.class_separation * static_cast<double>(c);
  }
  return means;
}

Pool generate(const SyntheticSpec& spec) {
  spec.validate();
  const auto means = class_means(spec);
  RngStream rng(spec.seed);

  std::vector<Observation> observations;
  observations.reserve(spec.m);
  auto activity = static_cast<ActivityIndex>(rng.uniform_index(spec.n_classes));
  for (std::size_t i = 0; i < spec.m; ++i) {
    if (i > 0 && rng.uniform01() < spec.switch_prob) {
      const auto other = static_cast<ActivityIndex>(rng.uniform_index(spec.n_classes - 1));
      activity = other >= activity ? other + 1 : other;
    }
    Observation obs;
    obs.features.resize(spec.d);
    for (std::size_t j = 0; j < spec.d; ++j) {
      obs.features[j] = means[activity][j] + spec.noise_sigma * rng.standard_normal();
    }
    obs.timestamp = static_cast<double>(i) * spec.dt;
    obs.true_label = activity;
    obs.subject = 0;
    obs.id = static_cast<ObservationId>(i);
    observations.push_back(std::move(obs));
  }
  return Pool(std::move(observations), spec.d);
}

}  // namespace emma
