// SPDX-License-Identifier: Apache-2.0
#include "darklight/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "darklight/error.hpp"
#include "text.hpp"

namespace darklight {

ClassifierModel ClassifierModel::zeros(std::vector<std::string> class_names, std::string schema, std::size_t dim) {
  ClassifierModel m;
  m.classes = class_names.size();
  m.dim = dim;
  m.weights.assign(m.classes * dim, 0.0);
  m.bias.assign(m.classes, 0.0);
  m.class_names = std::move(class_names);
  m.schema = std::move(schema);
  m.validate();
  return m;
}

void ClassifierModel::validate() const {
  if (classes < 2) throw PreconditionError("classifier: need at least two classes");
  if (class_names.size() != classes) throw PreconditionError("classifier: class name count mismatch");
  for (const auto& n : class_names) {
    if (n.empty() || n.find_first_of(",\r\n") != std::string::npos) {
      throw PreconditionError("classifier: class names must be non-empty and free of commas/newlines");
    }
  }
  if (weights.size() != classes * dim || bias.size() != classes) {
    throw PreconditionError("classifier: parameter shape mismatch");
  }
  if (schema_length(schema) != dim) throw PreconditionError("classifier: dimension disagrees with schema " + schema);
}

Batch Batch::from_features(const std::vector<FeatureVector>& features, const std::vector<int>& labels) {
  if (features.size() != labels.size()) throw PreconditionError("batch: feature/label count mismatch");
  if (features.empty()) throw PreconditionError("batch: no examples");
  Batch b;
  b.rows = features.size();
  b.dim = features.front().size();
  b.x.reserve(b.rows * b.dim);
  for (const auto& f : features) {
    if (f.schema != features.front().schema || f.size() != b.dim) {
      throw PreconditionError("batch: inconsistent feature schema");
    }
    b.x.insert(b.x.end(), f.values.begin(), f.values.end());
  }
  b.labels = labels;
  return b;
}

namespace {

void logits_into(const ClassifierModel& m, const double* x, std::vector<double>& out) {
  out.resize(m.classes);
  for (std::size_t c = 0; c < m.classes; ++c) {
    const double* w = m.weights.data() + c * m.dim;
    double s = m.bias[c];
    for (std::size_t d = 0; d < m.dim; ++d) s += w[d] * x[d];
    out[c] = s;
  }
}

/// In-place softmax; returns log of the normalizer.
double softmax_inplace(std::vector<double>& z) {
  const double top = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (auto& v : z) {
    v = std::exp(v - top);
    sum += v;
  }
  for (auto& v : z) v /= sum;
  return top + std::log(sum);
}

}  // namespace

LossGradient loss_and_gradient(const ClassifierModel& model, const Batch& batch, double l2) {
  if (batch.dim != model.dim) throw PreconditionError("loss: feature dimension mismatch");
  LossGradient out;
  out.grad_weights.assign(model.weights.size(), 0.0);
  out.grad_bias.assign(model.classes, 0.0);
  const double inv_n = 1.0 / static_cast<double>(batch.rows);
  std::vector<double> p;
  double loss = 0.0;
  for (std::size_t i = 0; i < batch.rows; ++i) {
    const double* x = batch.x.data() + i * batch.dim;
    const auto y = static_cast<std::size_t>(batch.labels[i]);
    logits_into(model, x, p);
    const double true_logit = p[y];
    const double log_z = softmax_inplace(p);
    loss += log_z - true_logit;
    p[y] -= 1.0;
    for (std::size_t c = 0; c < model.classes; ++c) {
      const double g = p[c] * inv_n;
      if (g == 0.0) continue;
      double* gw = out.grad_weights.data() + c * model.dim;
      for (std::size_t d = 0; d < model.dim; ++d) gw[d] += g * x[d];
      out.grad_bias[c] += g;
    }
  }
  double sq = 0.0;
  for (std::size_t k = 0; k < model.weights.size(); ++k) {
    sq += model.weights[k] * model.weights[k];
    out.grad_weights[k] += l2 * model.weights[k];
  }
  out.loss = loss * inv_n + 0.5 * l2 * sq;
  return out;
}

TrainResult train_classifier(const std::vector<FeatureVector>& features, const std::vector<int>& labels,
                             std::vector<std::string> class_names, const TrainHyper& hyper) {
  if (!(hyper.learning_rate > 0.0) || hyper.epochs < 0 || !(hyper.l2 >= 0.0)) {
    throw PreconditionError("train: invalid hyperparameters");
  }
  const Batch batch = Batch::from_features(features, labels);
  const std::size_t classes = class_names.size();
  std::vector<std::size_t> counts(classes, 0);
  for (int y : labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= classes) throw PreconditionError("train: label outside class list");
    ++counts[y];
  }
  for (std::size_t c = 0; c < classes; ++c) {
    if (counts[c] == 0) throw PreconditionError("train: class '" + class_names[c] + "' has no examples");
  }

  TrainResult result{ClassifierModel::zeros(std::move(class_names), features.front().schema, batch.dim), {}};
  auto& m = result.model;
  result.loss_trace.reserve(hyper.epochs);
  const double shrink = 1.0 / (1.0 + hyper.learning_rate * hyper.l2);
  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    // Data gradient only; the L2 part is applied by the proximal shrink.
    auto lg = loss_and_gradient(m, batch, 0.0);
    double sq = 0.0;
    for (double w : m.weights) sq += w * w;
    const double objective = lg.loss + 0.5 * hyper.l2 * sq;
    if (!std::isfinite(objective)) {
      throw NumericError("train: non-finite loss at epoch " + std::to_string(epoch) +
                         " (lower the learning rate or check the features)");
    }
    result.loss_trace.push_back(objective);
    for (std::size_t k = 0; k < m.weights.size(); ++k) {
      m.weights[k] = (m.weights[k] - hyper.learning_rate * lg.grad_weights[k]) * shrink;
    }
    for (std::size_t c = 0; c < m.classes; ++c) m.bias[c] -= hyper.learning_rate * lg.grad_bias[c];
  }
  return result;
}

std::vector<double> softmax(const std::vector<double>& scores) {
  std::vector<double> p = scores;
  softmax_inplace(p);
  return p;
}

std::vector<double> predict(const ClassifierModel& model, const FeatureVector& feature, bool use_softmax) {
  if (feature.schema != model.schema || feature.size() != model.dim) {
    throw PreconditionError("predict: feature schema '" + feature.schema + "' does not match model '" +
                            model.schema + "'");
  }
  std::vector<double> z;
  logits_into(model, feature.values.data(), z);
  if (use_softmax) softmax_inplace(z);
  return z;
}

std::size_t rank_of(const std::vector<double>& scores, std::size_t label) {
  std::size_t rank = 0;
  const double s = scores.at(label);
  for (std::size_t j = 0; j < scores.size(); ++j) {
    if (scores[j] > s || (scores[j] == s && j < label)) ++rank;
  }
  return rank;
}

double topk_accuracy(const std::vector<std::vector<double>>& scores, const std::vector<int>& labels, std::size_t k) {
  if (scores.size() != labels.size()) throw PreconditionError("topk: score/label count mismatch");
  if (scores.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (k > scores[i].size()) throw PreconditionError("topk: k exceeds class count");
    if (rank_of(scores[i], static_cast<std::size_t>(labels[i])) < k) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(scores.size());
}

// Model CSV:
//   schema,<schema>,classes,<C>,dim,<D>
//   class_names,<name_0>,...,<name_C-1>
//   C rows of D weights followed by the bias
void write_classifier(const ClassifierModel& model, std::ostream& out) {
  model.validate();
  out << "schema," << model.schema << ",classes," << model.classes << ",dim," << model.dim << '\n';
  out << "class_names";
  for (const auto& n : model.class_names) out << ',' << n;
  out << '\n';
  for (std::size_t c = 0; c < model.classes; ++c) {
    for (std::size_t d = 0; d < model.dim; ++d) out << text::format_double(model.weights[c * model.dim + d]) << ',';
    out << text::format_double(model.bias[c]) << '\n';
  }
}

ClassifierModel read_classifier(std::istream& in) {
  std::string line;
  auto fields = [&](const char* what) {
    if (!std::getline(in, line)) throw FormatError(std::string("model: missing ") + what);
    return text::split(text::trim(line), ',');
  };
  auto header = fields("header");
  if (header.size() != 6 || header[0] != "schema" || header[2] != "classes" || header[4] != "dim") {
    throw FormatError("model: malformed header");
  }
  ClassifierModel m;
  m.schema = header[1];
  m.classes = text::parse_int<std::size_t>(header[3], "classes");
  m.dim = text::parse_int<std::size_t>(header[5], "dim");
  auto names = fields("class names");
  if (names.empty() || names[0] != "class_names" || names.size() != m.classes + 1) {
    throw FormatError("model: class name row disagrees with class count");
  }
  m.class_names.assign(names.begin() + 1, names.end());
  m.weights.resize(m.classes * m.dim);
  m.bias.resize(m.classes);
  for (std::size_t c = 0; c < m.classes; ++c) {
    auto row = fields("weight row");
    if (row.size() != m.dim + 1) throw FormatError("model: weight row " + std::to_string(c) + " has wrong length");
    for (std::size_t d = 0; d < m.dim; ++d) m.weights[c * m.dim + d] = text::parse_double(row[d], "weight");
    m.bias[c] = text::parse_double(row[m.dim], "bias");
  }
  try {
    m.validate();
  } catch (const PreconditionError& e) {
    throw FormatError(std::string("model: ") + e.what());
  }
  return m;
}

void save_classifier(const ClassifierModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  write_classifier(model, out);
}

ClassifierModel load_classifier(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return read_classifier(in);
}

}  // namespace darklight
