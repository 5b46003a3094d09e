/*
 * Copyright 2026 The dramnet Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Classification metrics, one-vs-rest ROC curves and the thresholded
// accept/reject decision.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dramnet/errors.hpp"
#include "dramnet/imaging.hpp"
#include "dramnet/model.hpp"
#include "dramnet/pipeline.hpp"

namespace dramnet::eval {

// Rows are the true class, columns the predicted class.
class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  explicit ConfusionMatrix(std::size_t n) : n_(n), counts_(n * n, 0) {}

  std::size_t n_classes() const { return n_; }
  std::uint64_t& at(std::size_t truth, std::size_t predicted) { return counts_[truth * n_ + predicted]; }
  std::uint64_t at(std::size_t truth, std::size_t predicted) const { return counts_[truth * n_ + predicted]; }
  std::uint64_t total() const { return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0}); }
  std::uint64_t trace() const {
    std::uint64_t t = 0;
    for (std::size_t i = 0; i < n_; ++i) t += at(i, i);
    return t;
  }

  bool operator==(const ConfusionMatrix&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::uint64_t> counts_;
};

inline ConfusionMatrix confusion_matrix(std::span<const std::size_t> predictions,
                                        std::span<const std::size_t> labels, std::size_t n_classes) {
  if (predictions.size() != labels.size()) throw ShapeError("predictions and labels differ in length");
  ConfusionMatrix cm(n_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= n_classes || predictions[i] >= n_classes)
      throw ParameterError("class index " + std::to_string(std::max(labels[i], predictions[i])) +
                           " outside [0, " + std::to_string(n_classes) + ")");
    ++cm.at(labels[i], predictions[i]);
  }
  return cm;
}

// Class count inferred as one more than the largest index seen.
inline ConfusionMatrix confusion_matrix(std::span<const std::size_t> predictions,
                                        std::span<const std::size_t> labels) {
  std::size_t n = 0;
  for (std::size_t v : predictions) n = std::max(n, v + 1);
  for (std::size_t v : labels) n = std::max(n, v + 1);
  return confusion_matrix(predictions, labels, n);
}

struct ClassMetrics {
  std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct MetricsReport {
  double accuracy = 0.0;
  std::vector<ClassMetrics> per_class;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  ConfusionMatrix counts;
};

// Zero denominators yield 0 for precision and recall, and F1 is 0 when both are.
inline MetricsReport metrics(const ConfusionMatrix& cm) {
  const std::uint64_t total = cm.total();
  if (cm.n_classes() == 0 || total == 0) throw DegenerateInputError("metrics of an empty confusion matrix");
  MetricsReport r;
  r.counts = cm;
  r.accuracy = static_cast<double>(cm.trace()) / static_cast<double>(total);
  const std::size_t n = cm.n_classes();
  for (std::size_t k = 0; k < n; ++k) {
    ClassMetrics c;
    c.tp = cm.at(k, k);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == k) continue;
      c.fn += cm.at(k, j);
      c.fp += cm.at(j, k);
    }
    c.tn = total - c.tp - c.fn - c.fp;
    c.precision = c.tp + c.fp ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp) : 0.0;
    c.recall = c.tp + c.fn ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn) : 0.0;
    c.f1 = c.precision + c.recall > 0.0 ? 2.0 * c.precision * c.recall / (c.precision + c.recall) : 0.0;
    r.macro_precision += c.precision;
    r.macro_recall += c.recall;
    r.macro_f1 += c.f1;
    r.per_class.push_back(c);
  }
  r.macro_precision /= static_cast<double>(n);
  r.macro_recall /= static_cast<double>(n);
  r.macro_f1 /= static_cast<double>(n);
  return r;
}

// --- ROC --------------------------------------------------------------------

struct RocPoint {
  double threshold = 0.0;  // +inf for the origin
  double fpr = 0.0;
  double tpr = 0.0;
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
};

struct RocCurve {
  std::size_t class_id = 0;
  std::vector<RocPoint> points;
  std::uint64_t positives = 0;
  std::uint64_t negatives = 0;
  double auc = 0.0;
};

// Trapezoidal area, evaluated on the integer counts so it equals the
// pairwise concordance probability (ties worth one half) exactly.
inline double auc(const RocCurve& curve) {
  if (curve.positives == 0 || curve.negatives == 0) throw DegenerateInputError("ROC without both classes");
  std::uint64_t twice_area = 0;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const auto& a = curve.points[i - 1];
    const auto& b = curve.points[i];
    twice_area += (b.fp - a.fp) * (a.tp + b.tp);
  }
  return static_cast<double>(twice_area) /
         (2.0 * static_cast<double>(curve.positives) * static_cast<double>(curve.negatives));
}

// Sweeps the threshold over the distinct scores, highest first; equal scores
// enter the curve together.
inline RocCurve roc_curve(std::span<const double> scores, const std::vector<bool>& is_positive,
                          std::size_t class_id = 0) {
  if (scores.size() != is_positive.size()) throw ShapeError("scores and labels differ in length");
  RocCurve c;
  c.class_id = class_id;
  for (bool p : is_positive) (p ? c.positives : c.negatives) += 1;
  if (c.positives == 0 || c.negatives == 0)
    throw DegenerateInputError("ROC needs at least one positive and one negative sample");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  const double P = static_cast<double>(c.positives);
  const double N = static_cast<double>(c.negatives);
  c.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0, 0, 0});
  std::uint64_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double thr = scores[order[i]];
    while (i < order.size() && scores[order[i]] == thr) {
      (is_positive[order[i]] ? tp : fp) += 1;
      ++i;
    }
    c.points.push_back({thr, static_cast<double>(fp) / N, static_cast<double>(tp) / P, tp, fp});
  }
  c.auc = auc(c);
  return c;
}

// --- model evaluation ---------------------------------------------------------

struct Evaluation {
  MetricsReport report;
  std::vector<RocCurve> rocs;  // one per class, one-vs-rest
  std::vector<std::vector<double>> probabilities;
  std::vector<std::size_t> predictions;
  std::vector<std::size_t> labels;
};

inline Evaluation evaluate_probabilities(std::vector<std::vector<double>> probs, std::vector<std::size_t> labels,
                                         std::size_t n_classes) {
  if (probs.empty()) throw DegenerateInputError("empty test set");
  Evaluation ev;
  ev.labels = std::move(labels);
  ev.probabilities = std::move(probs);
  for (const auto& row : ev.probabilities) ev.predictions.push_back(pipeline::argmax(row));
  ev.report = metrics(confusion_matrix(ev.predictions, ev.labels, n_classes));
  for (std::size_t k = 0; k < n_classes; ++k) {
    std::vector<double> scores;
    std::vector<bool> positive;
    for (std::size_t i = 0; i < ev.labels.size(); ++i) {
      scores.push_back(ev.probabilities[i][k]);
      positive.push_back(ev.labels[i] == k);
    }
    try {
      ev.rocs.push_back(roc_curve(scores, positive, k));
    } catch (const DegenerateInputError&) {
      // a class absent from (or the only class in) the test set has no curve
    }
  }
  return ev;
}

// Images may be at any resolution that divides into the model input.
template <typename T>
Evaluation evaluate(nn::Model<T>& model, std::span<const imaging::FingerprintImage> test_set) {
  if (test_set.empty()) throw DegenerateInputError("empty test set");
  const auto& in = model.architecture().input;
  const auto inputs = pipeline::prepare_inputs(test_set, in.h, in.w, false, 1.0);
  std::vector<std::size_t> labels;
  for (const auto& img : inputs) labels.push_back(img.label);
  return evaluate_probabilities(pipeline::predict_probabilities(model, inputs), std::move(labels),
                                model.n_classes());
}

// --- authentication --------------------------------------------------------

inline constexpr double kDefaultThreshold = 0.9;

struct AuthDecision {
  bool accepted = false;
  std::optional<std::size_t> device_id;  // set only when accepted
  std::size_t best_class = 0;
  std::vector<double> probabilities;
  double threshold = kDefaultThreshold;
};

// Accept iff the top class probability reaches the threshold.
inline AuthDecision decide(std::vector<double> probabilities, double threshold) {
  if (probabilities.empty()) throw ShapeError("no class probabilities");
  AuthDecision d;
  d.best_class = pipeline::argmax(probabilities);
  d.accepted = probabilities[d.best_class] >= threshold;
  if (d.accepted) d.device_id = d.best_class;
  d.probabilities = std::move(probabilities);
  d.threshold = threshold;
  return d;
}

template <typename T>
AuthDecision authenticate(nn::Model<T>& model, const sim::Measurement& m, double threshold = kDefaultThreshold) {
  const auto& in = model.architecture().input;
  if (m.bits.rows() % in.h != 0 || m.bits.cols() % in.w != 0)
    throw DimensionError("measurement " + std::to_string(m.bits.rows()) + "x" + std::to_string(m.bits.cols()) +
                         " does not reduce to model input " + std::to_string(in.h) + "x" + std::to_string(in.w));
  const auto img = imaging::downscale(imaging::to_image(m), in.h, in.w);
  auto probs = pipeline::predict_probabilities(model, std::span<const imaging::FingerprintImage>(&img, 1));
  return decide(std::move(probs.front()), threshold);
}

// --- serialization ------------------------------------------------------------

inline nlohmann::json metrics_json(const MetricsReport& r, std::span<const RocCurve> rocs = {}) {
  nlohmann::json per_class = nlohmann::json::array();
  for (std::size_t k = 0; k < r.per_class.size(); ++k) {
    const auto& c = r.per_class[k];
    per_class.push_back({{"class", k}, {"precision", c.precision}, {"recall", c.recall}, {"f1", c.f1},
                         {"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}, {"tn", c.tn}});
  }
  nlohmann::json cm = nlohmann::json::array();
  for (std::size_t i = 0; i < r.counts.n_classes(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t j = 0; j < r.counts.n_classes(); ++j) row.push_back(r.counts.at(i, j));
    cm.push_back(row);
  }
  nlohmann::json aucs = nlohmann::json::object();
  for (const auto& c : rocs) aucs[std::to_string(c.class_id)] = c.auc;
  return {{"accuracy", r.accuracy},
          {"macro", {{"precision", r.macro_precision}, {"recall", r.macro_recall}, {"f1", r.macro_f1}}},
          {"per_class", per_class},
          {"confusion", cm},
          {"total", r.counts.total()},
          {"auc", aucs}};
}

inline std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string roc_csv(std::span<const RocCurve> rocs) {
  std::string out = "class,threshold,fpr,tpr\n";
  for (const auto& c : rocs) {
    for (const auto& p : c.points) {
      out += std::to_string(c.class_id) + "," + format_double(p.threshold) + "," + format_double(p.fpr) + "," +
             format_double(p.tpr) + "\n";
    }
  }
  return out;
}

inline std::string confusion_csv(const ConfusionMatrix& cm) {
  std::string out = "true\\predicted";
  for (std::size_t j = 0; j < cm.n_classes(); ++j) out += "," + std::to_string(j);
  out += "\n";
  for (std::size_t i = 0; i < cm.n_classes(); ++i) {
    out += std::to_string(i);
    for (std::size_t j = 0; j < cm.n_classes(); ++j) out += "," + std::to_string(cm.at(i, j));
    out += "\n";
  }
  return out;
}

inline nlohmann::json decision_json(const AuthDecision& d) {
  nlohmann::json j = {{"accepted", d.accepted}, {"probabilities", d.probabilities}, {"threshold", d.threshold}};
  j["device_id"] = d.device_id ? nlohmann::json(*d.device_id) : nlohmann::json(nullptr);
  return j;
}

}  // namespace dramnet::eval
