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
#include <span>
#include <vector>

#include "emma/core_data.hpp"

namespace emma {

struct ClassifierParams {
  double l2_lambda = 1e-3;
  double learning_rate = 0.5;
  int epochs = 300;

  void validate() const;
};

/// Multinomial logistic regression. Weights are stored row-major as an
/// n x (d+1) matrix; the last column of each row is that class's bias.
class SoftmaxClassifier {
 public:
  // All-zero weights: predicts the uniform distribution everywhere.
  SoftmaxClassifier(std::size_t n_classes, std::size_t dimension);
  SoftmaxClassifier(std::size_t n_classes, std::size_t dimension, std::vector<double> weights);

  std::size_t n_classes() const { return n_classes_; }
  std::size_t dimension() const { return dimension_; }
  const std::vector<double>& weights() const { return weights_; }

  // Raw linear scores, one per class.
  std::vector<double> scores(std::span<const double> x) const;

  std::vector<double> predict_proba(std::span<const double> x) const;
  std::vector<double> predict_proba(const Observation& x) const;
  // Writes the distribution into `out` (size n); no allocation.
  void predict_proba_into(std::span<const double> x, std::span<double> out) const;

  // Argmax of the distribution; ties go to the lowest class index.
  ActivityIndex predict(std::span<const double> x) const;

 private:
  void check_dimension(std::size_t got) const;

  std::size_t n_classes_;
  std::size_t dimension_;
  std::vector<double> weights_;
};

/// Softmax with max-score subtraction, in place.
void softmax_inplace(std::span<double> scores);

/// Design matrix view of a labeled set used by training.
struct TrainingData {
  std::size_t dimension = 0;
  std::vector<double> features;  // N x d, row-major
  std::vector<ActivityIndex> labels;

  std::size_t size() const { return labels.size(); }
  static TrainingData from(const LabeledSet& labeled);
};

/// Mean cross-entropy plus (lambda / 2) * ||W||^2 over non-bias weights.
double training_loss(std::span<const double> weights, const TrainingData& data,
                     std::size_t n_classes, double l2_lambda);

/// Analytic gradient of training_loss; returns the loss as well.
double training_loss_gradient(std::span<const double> weights, const TrainingData& data,
                              std::size_t n_classes, double l2_lambda,
                              std::span<double> gradient);

/// Full-batch gradient descent from zero weights for a fixed number of
/// epochs. Uses assigned labels only. Deterministic.
SoftmaxClassifier fit(const LabeledSet& labeled, const ActivityVocabulary& vocabulary,
                      const ClassifierParams& params = {});
SoftmaxClassifier fit(const TrainingData& data, std::size_t n_classes,
                      const ClassifierParams& params = {});

/// Fraction of test observations whose predicted class equals the true label.
double accuracy(const SoftmaxClassifier& model, const Pool& test);

/// Per-feature standardization with statistics from one pool. Constant
/// features get unit scale.
class FeatureScaler {
 public:
  static FeatureScaler fit(const Pool& pool);
  Pool transform(const Pool& pool) const;

  const std::vector<double>& mean() const { return mean_; }
  const std::vector<double>& scale() const { return scale_; }

 private:
  std::vector<double> mean_;
  std::vector<double> scale_;
};

}  // namespace emma
