// SPDX-License-Identifier: Apache-2.0
//
// Linear softmax classification head trained by full-batch gradient descent.
#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "darklight/features.hpp"

namespace darklight {

struct ClassifierModel {
  std::size_t classes = 0;
  std::size_t dim = 0;
  std::vector<double> weights;  ///< classes x dim, row-major
  std::vector<double> bias;     ///< classes
  std::vector<std::string> class_names;
  std::string schema;

  /// Zero weights and bias.
  static ClassifierModel zeros(std::vector<std::string> class_names, std::string schema, std::size_t dim);
  void validate() const;
  bool operator==(const ClassifierModel&) const = default;
};

struct TrainHyper {
  double learning_rate = 0.5;
  int epochs = 2000;
  double l2 = 1e-4;
  bool operator==(const TrainHyper&) const = default;
};

/// Row-major example matrix with integer labels in [0, classes).
struct Batch {
  std::size_t rows = 0;
  std::size_t dim = 0;
  std::vector<double> x;
  std::vector<int> labels;

  static Batch from_features(const std::vector<FeatureVector>& features, const std::vector<int>& labels);
};

struct LossGradient {
  double loss = 0.0;
  std::vector<double> grad_weights;
  std::vector<double> grad_bias;
};

/// Mean cross-entropy + (l2 / 2) * |W|^2 and its gradient. Sums run in
/// example order.
LossGradient loss_and_gradient(const ClassifierModel& model, const Batch& batch, double l2);

struct TrainResult {
  ClassifierModel model;
  /// Objective evaluated before each epoch's update.
  std::vector<double> loss_trace;
};

/// Starts from zero parameters. Each epoch takes a gradient step on the
/// cross-entropy and applies the L2 term through its proximal map,
/// W <- (W - lr * grad) / (1 + lr * l2), which keeps any l2 stable and has the
/// same minimizer as plain descent on the full objective.
TrainResult train_classifier(const std::vector<FeatureVector>& features, const std::vector<int>& labels,
                             std::vector<std::string> class_names, const TrainHyper& hyper = {});

/// Raw scores W x + b, optionally softmax-normalized.
std::vector<double> predict(const ClassifierModel& model, const FeatureVector& feature, bool softmax = false);
std::vector<double> softmax(const std::vector<double>& scores);

/// Position of `label` when classes are ranked by descending score with ties
/// resolved in favor of the lower class index (0 = top).
std::size_t rank_of(const std::vector<double>& scores, std::size_t label);

double topk_accuracy(const std::vector<std::vector<double>>& scores, const std::vector<int>& labels, std::size_t k);

void write_classifier(const ClassifierModel& model, std::ostream& out);
ClassifierModel read_classifier(std::istream& in);
void save_classifier(const ClassifierModel& model, const std::filesystem::path& path);
ClassifierModel load_classifier(const std::filesystem::path& path);

}  // namespace darklight
