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

#include "emma/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/core.h>

#include "emma/error.hpp"

namespace emma {
namespace {
constexpr std::size_t kMaxStackClasses = 32;
}  // namespace

void ClassifierParams::validate() const {
  if (!(l2_lambda >= 0.0) || !std::isfinite(l2_lambda)) {
    throw ConfigError(fmt::format("classifier.l2_lambda must be >= 0, got {}", l2_lambda));
  }
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError(
        fmt::format("classifier.learning_rate must be > 0, got {}", learning_rate));
  }
  if (epochs <= 0) throw ConfigError(fmt::format("classifier.epochs must be > 0, got {}", epochs));
}

SoftmaxClassifier::SoftmaxClassifier(std::size_t n_classes, std::size_t dimension)
    : SoftmaxClassifier(n_classes, dimension,
                        std::vector<double>(n_classes * (dimension + 1), 0.0)) {}

SoftmaxClassifier::SoftmaxClassifier(std::size_t n_classes, std::size_t dimension,
                                     std::vector<double> weights)
    : n_classes_(n_classes), dimension_(dimension), weights_(std::move(weights)) {
  if (n_classes_ < 2) throw std::invalid_argument("classifier needs at least 2 classes");
  if (weights_.size() != n_classes_ * (dimension_ + 1)) {
    throw std::invalid_argument(fmt::format("weight matrix must have {} entries, got {}",
                                            n_classes_ * (dimension_ + 1), weights_.size()));
  }
  for (double w : weights_) {
    if (!std::isfinite(w)) throw std::invalid_argument("classifier weights must be finite");
  }
}

void SoftmaxClassifier::check_dimension(std::size_t got) const {
  if (got != dimension_) {
    throw DataError(
        fmt::format("feature dimension mismatch: model expects {}, got {}", dimension_, got));
  }
}

std::vector<double> SoftmaxClassifier::scores(std::span<const double> x) const {
  check_dimension(x.size());
  std::vector<double> z(n_classes_);
  const std::size_t stride = dimension_ + 1;
  for (std::size_t c = 0; c < n_classes_; ++c) {
    const double* w = weights_.data() + c * stride;
    double s = w[dimension_];
    for (std::size_t j = 0; j < dimension_; ++j) s += w[j] * x[j];
    z[c] = s;
  }
  return z;
}

void softmax_inplace(std::span<double> z) {
  const double top = *std::max_element(z.begin(), z.end());
  double total = 0.0;
  for (double& v : z) {
    v = std::exp(v - top);
    total += v;
  }
  for (double& v : z) v /= total;
}

void SoftmaxClassifier::predict_proba_into(std::span<const double> x,
                                           std::span<double> out) const {
  check_dimension(x.size());
  const std::size_t stride = dimension_ + 1;
  for (std::size_t c = 0; c < n_classes_; ++c) {
    const double* w = weights_.data() + c * stride;
    double s = w[dimension_];
    for (std::size_t j = 0; j < dimension_; ++j) s += w[j] * x[j];
    out[c] = s;
  }
  softmax_inplace(out.first(n_classes_));
}

std::vector<double> SoftmaxClassifier::predict_proba(std::span<const double> x) const {
  std::vector<double> p(n_classes_);
  predict_proba_into(x, p);
  return p;
}

std::vector<double> SoftmaxClassifier::predict_proba(const Observation& x) const {
  return predict_proba(std::span<const double>(x.features));
}

ActivityIndex SoftmaxClassifier::predict(std::span<const double> x) const {
  const auto p = predict_proba(x);
  // max_element returns the first maximum, i.e. the lowest index on ties.
  return static_cast<ActivityIndex>(std::max_element(p.begin(), p.end()) - p.begin());
}

TrainingData TrainingData::from(const LabeledSet& labeled) {
  TrainingData data;
  if (labeled.empty()) return data;
  data.dimension = labeled.entries().front().observation.features.size();
  data.features.reserve(labeled.size() * data.dimension);
  data.labels.reserve(labeled.size());
  for (const auto& e : labeled.entries()) {
    const auto& f = e.observation.features;
    if (f.size() != data.dimension) {
      throw DataError(fmt::format("labeled observation {} has dimension {}, expected {}",
                                  e.observation.id, f.size(), data.dimension));
    }
    for (double v : f) {
      if (!std::isfinite(v)) {
        throw DataError(
            fmt::format("labeled observation {} has a non-finite feature", e.observation.id));
      }
    }
    data.features.insert(data.features.end(), f.begin(), f.end());
    data.labels.push_back(e.assigned_label);
  }
  return data;
}

namespace {

// Shared kernel: loss (when kWantLoss) and the gradient (when `gradient` is
// non-empty). Training skips the loss, which saves one log per sample.
template <bool kWantLoss>
double loss_kernel(std::span<const double> weights, const TrainingData& data,
                   std::size_t n_classes, double l2_lambda, std::span<double> gradient) {
  const std::size_t d = data.dimension;
  const std::size_t stride = d + 1;
  const std::size_t count = data.size();
  const bool want_gradient = !gradient.empty();
  if (want_gradient) std::fill(gradient.begin(), gradient.end(), 0.0);

  double z[kMaxStackClasses];
  std::vector<double> heap;
  double* scores = z;
  if (n_classes > kMaxStackClasses) {
    heap.resize(n_classes);
    scores = heap.data();
  }

  double loss = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double* x = data.features.data() + i * d;
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < n_classes; ++c) {
      const double* w = weights.data() + c * stride;
      double s = w[d];
      for (std::size_t j = 0; j < d; ++j) s += w[j] * x[j];
      scores[c] = s;
      top = std::max(top, s);
    }
    double total = 0.0;
    for (std::size_t c = 0; c < n_classes; ++c) {
      scores[c] = std::exp(scores[c] - top);
      total += scores[c];
    }
    const ActivityIndex y = data.labels[i];
    if constexpr (kWantLoss) loss -= std::log(scores[y] / total);
    if (!want_gradient) continue;
    const double inv_total = 1.0 / total;
    for (std::size_t c = 0; c < n_classes; ++c) {
      const double residual = scores[c] * inv_total - (c == y ? 1.0 : 0.0);
      double* g = gradient.data() + c * stride;
      for (std::size_t j = 0; j < d; ++j) g[j] += residual * x[j];
      g[d] += residual;
    }
  }

  const double inv = count > 0 ? 1.0 / static_cast<double>(count) : 0.0;
  loss *= inv;
  double penalty = 0.0;
  for (std::size_t c = 0; c < n_classes; ++c) {
    for (std::size_t j = 0; j < d; ++j) {
      const double w = weights[c * stride + j];
      penalty += w * w;
      if (want_gradient) {
        double& g = gradient[c * stride + j];
        g = g * inv + l2_lambda * w;
      }
    }
    if (want_gradient) gradient[c * stride + d] *= inv;
  }
  return loss + 0.5 * l2_lambda * penalty;
}

}  // namespace

double training_loss(std::span<const double> weights, const TrainingData& data,
                     std::size_t n_classes, double l2_lambda) {
  return loss_kernel<true>(weights, data, n_classes, l2_lambda, {});
}

double training_loss_gradient(std::span<const double> weights, const TrainingData& data,
                              std::size_t n_classes, double l2_lambda,
                              std::span<double> gradient) {
  if (gradient.size() != weights.size()) {
    throw std::invalid_argument("gradient buffer must match the weight count");
  }
  return loss_kernel<true>(weights, data, n_classes, l2_lambda, gradient);
}

SoftmaxClassifier fit(const TrainingData& data, std::size_t n_classes,
                      const ClassifierParams& params) {
  params.validate();
  if (data.size() == 0) throw DataError("cannot fit a classifier on an empty labeled set");
  for (ActivityIndex y : data.labels) {
    if (y >= n_classes) throw DataError(fmt::format("label {} outside [0, {})", y, n_classes));
  }
  std::vector<double> weights(n_classes * (data.dimension + 1), 0.0);
  std::vector<double> gradient(weights.size());
  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    loss_kernel<false>(weights, data, n_classes, params.l2_lambda, gradient);
    for (std::size_t k = 0; k < weights.size(); ++k) {
      weights[k] -= params.learning_rate * gradient[k];
    }
  }
  for (double w : weights) {
    if (!std::isfinite(w)) {
      throw DataError("classifier training diverged; lower learning_rate or l2_lambda");
    }
  }
  return SoftmaxClassifier(n_classes, data.dimension, std::move(weights));
}

SoftmaxClassifier fit(const LabeledSet& labeled, const ActivityVocabulary& vocabulary,
                      const ClassifierParams& params) {
  return fit(TrainingData::from(labeled), vocabulary.size(), params);
}

double accuracy(const SoftmaxClassifier& model, const Pool& test) {
  if (test.empty()) throw DataError("accuracy of an empty test set");
  std::vector<double> p(model.n_classes());
  std::size_t correct = 0;
  for (const auto& obs : test) {
    model.predict_proba_into(obs.features, p);
    const auto predicted = static_cast<ActivityIndex>(std::max_element(p.begin(), p.end()) - p.begin());
    if (predicted == obs.true_label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(test.size());
}

FeatureScaler FeatureScaler::fit(const Pool& pool) {
  if (pool.empty()) throw DataError("cannot fit a feature scaler on an empty pool");
  const std::size_t d = pool.dimension();
  FeatureScaler s;
  s.mean_.assign(d, 0.0);
  s.scale_.assign(d, 0.0);
  for (const auto& obs : pool) {
    for (std::size_t j = 0; j < d; ++j) s.mean_[j] += obs.features[j];
  }
  const double count = static_cast<double>(pool.size());
  for (double& m : s.mean_) m /= count;
  for (const auto& obs : pool) {
    for (std::size_t j = 0; j < d; ++j) {
      const double dev = obs.features[j] - s.mean_[j];
      s.scale_[j] += dev * dev;
    }
  }
  for (double& v : s.scale_) {
    v = std::sqrt(v / count);
    if (!(v > 1e-12)) v = 1.0;
  }
  return s;
}

Pool FeatureScaler::transform(const Pool& pool) const {
  if (pool.dimension() != mean_.size()) {
    throw DataError(fmt::format("scaler fitted on dimension {}, pool has {}", mean_.size(),
                                pool.dimension()));
  }
  std::vector<Observation> out(pool.observations());
  for (auto& obs : out) {
    for (std::size_t j = 0; j < mean_.size(); ++j) {
      obs.features[j] = (obs.features[j] - mean_[j]) / scale_[j];
    }
  }
  return Pool(std::move(out), pool.dimension());
}

}  // namespace emma
