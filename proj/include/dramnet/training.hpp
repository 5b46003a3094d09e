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

#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "dramnet/errors.hpp"
#include "dramnet/model.hpp"
#include "dramnet/optimizer.hpp"
#include "dramnet/pipeline.hpp"
#include "dramnet/random.hpp"

namespace dramnet::train {

struct TrainConfig {
  std::string arch = "dramnet";
  OptimizerKind optimizer = OptimizerKind::Adam;
  std::optional<double> lr0;  // unset: 0.01 for SGD, 0.001 for Adam
  double decay_rate = 0.9;
  std::uint64_t decay_period = 500;
  double momentum = 0.9;
  AdamHyper adam;
  std::size_t batch_size = 16;
  std::size_t epochs = 30;
  double lambda = 1e-4;
  bool augment = false;
  double crop_fraction = 0.875;
  std::size_t input_size = 64;
  double split_ratio = 0.6;
  std::uint64_t seed = 1;
  std::uint64_t split_seed = 1;

  double initial_lr() const {
    if (lr0) return *lr0;
    return optimizer == OptimizerKind::Adam ? 0.001 : 0.01;
  }

  void validate() const {
    if (!(split_ratio > 0.0 && split_ratio < 1.0)) throw ParameterError("split_ratio must be in (0, 1)");
    if (batch_size < 2) throw ParameterError("batch_size must be >= 2 (batchnorm needs batch statistics)");
    if (!(initial_lr() > 0.0)) throw ParameterError("learning rate must be > 0");
    if (!(decay_rate > 0.0 && decay_rate <= 1.0)) throw ParameterError("decay_rate must be in (0, 1]");
    if (decay_period == 0) throw ParameterError("decay_period must be >= 1");
    if (lambda < 0.0) throw ParameterError("lambda must be >= 0");
    if (input_size == 0) throw ParameterError("input_size must be >= 1");
    if (!(crop_fraction > 0.0 && crop_fraction <= 1.0)) throw ParameterError("crop_fraction must be in (0, 1]");
  }
};

inline void to_json(nlohmann::json& j, const TrainConfig& c) {
  j = {{"arch", c.arch},
       {"optimizer", std::string(optimizer_name(c.optimizer))},
       {"lr0", c.initial_lr()},
       {"decay_rate", c.decay_rate},
       {"decay_period", c.decay_period},
       {"momentum", c.momentum},
       {"adam_beta1", c.adam.beta1},
       {"adam_beta2", c.adam.beta2},
       {"adam_epsilon", c.adam.epsilon},
       {"batch_size", c.batch_size},
       {"epochs", c.epochs},
       {"lambda", c.lambda},
       {"augment", c.augment},
       {"crop_fraction", c.crop_fraction},
       {"input_size", c.input_size},
       {"split_ratio", c.split_ratio},
       {"seed", c.seed},
       {"split_seed", c.split_seed}};
}

inline void from_json(const nlohmann::json& j, TrainConfig& c) {
  c.arch = j.value("arch", c.arch);
  if (j.contains("optimizer")) c.optimizer = parse_optimizer(j["optimizer"].get<std::string>());
  if (j.contains("lr0")) c.lr0 = j["lr0"].get<double>();
  c.decay_rate = j.value("decay_rate", c.decay_rate);
  c.decay_period = j.value("decay_period", c.decay_period);
  c.momentum = j.value("momentum", c.momentum);
  c.adam.beta1 = j.value("adam_beta1", c.adam.beta1);
  c.adam.beta2 = j.value("adam_beta2", c.adam.beta2);
  c.adam.epsilon = j.value("adam_epsilon", c.adam.epsilon);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.epochs = j.value("epochs", c.epochs);
  c.lambda = j.value("lambda", c.lambda);
  c.augment = j.value("augment", c.augment);
  c.crop_fraction = j.value("crop_fraction", c.crop_fraction);
  c.input_size = j.value("input_size", c.input_size);
  c.split_ratio = j.value("split_ratio", c.split_ratio);
  c.seed = j.value("seed", c.seed);
  c.split_seed = j.value("split_seed", c.split_seed);
  c.validate();
}

// --- splitting and batching -------------------------------------------------

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Stratified split: every class contributes the same number of training
// samples, round(ratio * smallest class size); the rest go to test.
inline Split split_dataset(std::span<const std::uint32_t> labels, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw ParameterError("split ratio must be in (0, 1)");
  std::map<std::uint32_t, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  if (by_class.empty()) throw ParameterError("cannot split an empty dataset");
  std::size_t smallest = labels.size();
  for (const auto& [label, idx] : by_class) {
    if (idx.size() < 2)
      throw ParameterError("class " + std::to_string(label) + " has fewer than 2 measurements");
    smallest = std::min(smallest, idx.size());
  }
  const auto per_class = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(ratio * static_cast<double>(smallest))), 1, smallest - 1);
  Split s;
  for (const auto& [label, idx] : by_class) {
    const auto perm = seeded_permutation(idx.size(), derive_seed(seed, {0x5911, label}));
    for (std::size_t k = 0; k < idx.size(); ++k) (k < per_class ? s.train : s.test).push_back(idx[perm[k]]);
  }
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

inline Split split_dataset(const sim::Dataset& ds, double ratio, std::uint64_t seed) {
  std::vector<std::uint32_t> labels;
  labels.reserve(ds.measurements.size());
  for (const auto& m : ds.measurements) labels.push_back(m.device_id);
  return split_dataset(labels, ratio, seed);
}

// [begin, end) ranges covering n items. The last partial batch is kept; a
// trailing batch of one is folded into its predecessor because batchnorm
// cannot train on a single sample.
inline std::vector<std::pair<std::size_t, std::size_t>> make_batches(std::size_t n, std::size_t batch_size) {
  if (batch_size == 0) throw ParameterError("batch_size must be >= 1");
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t b = 0; b < n; b += batch_size) out.emplace_back(b, std::min(n, b + batch_size));
  if (out.size() > 1 && out.back().second - out.back().first == 1) {
    out.pop_back();
    out.back().second = n;
  }
  return out;
}

inline std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t seed, std::size_t epoch) {
  return seeded_permutation(n, derive_seed(seed, {0x5401, epoch}));
}

// --- training loop -----------------------------------------------------------

struct StepRecord {
  std::uint64_t step = 0;
  double lr = 0.0;
  double loss = 0.0;       // cross-entropy + L2 penalty
  double data_loss = 0.0;  // cross-entropy only
  std::size_t epoch = 0;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_acc = 0.0;             // running accuracy over the epoch's training batches
  std::optional<double> test_acc;     // inference mode; unset without a test set
  double seconds = 0.0;
};

struct TrainHistory {
  std::vector<StepRecord> steps;
  std::vector<EpochRecord> epochs;
  std::size_t train_images = 0;  // after augmentation
  std::size_t batches_per_epoch = 0;
  double wall_seconds = 0.0;
};

template <typename T>
struct TrainResult {
  nn::Model<T> model;
  TrainHistory history;
};

// Observer hooks, mainly for tests and progress logging.
struct TrainHooks {
  std::function<void(std::size_t epoch, std::span<const std::size_t> batch)> on_batch;
  std::function<void(const EpochRecord&)> on_epoch;
};

inline double accuracy_of(const std::vector<std::vector<double>>& probs,
                          std::span<const imaging::FingerprintImage> images) {
  if (images.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < images.size(); ++i)
    if (pipeline::argmax(probs[i]) == images[i].label) ++correct;
  return static_cast<double>(correct) / static_cast<double>(images.size());
}

template <typename T>
TrainResult<T> train(nn::Model<T> model, std::span<const imaging::FingerprintImage> train_set,
                     std::span<const imaging::FingerprintImage> test_set, const TrainConfig& cfg,
                     const TrainHooks& hooks = {}) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const auto& in = model.architecture().input;
  if (train_set.empty()) throw ContractError("training set is empty");
  const auto train_inputs = pipeline::prepare_inputs(train_set, in.h, in.w, cfg.augment, cfg.crop_fraction);
  const auto test_inputs = pipeline::prepare_inputs(test_set, in.h, in.w, false, cfg.crop_fraction);
  if (cfg.batch_size > train_inputs.size())
    throw ContractError("batch_size " + std::to_string(cfg.batch_size) + " exceeds training set size " +
                        std::to_string(train_inputs.size()));
  for (const auto& img : train_inputs)
    if (img.label >= model.n_classes()) throw ContractError("training label outside model classes");

  TrainResult<T> result{std::move(model), {}};
  auto& hist = result.history;
  hist.train_images = train_inputs.size();
  const auto batches = make_batches(train_inputs.size(), cfg.batch_size);
  hist.batches_per_epoch = batches.size();

  Optimizer<T> opt(cfg.optimizer, cfg.momentum, cfg.adam);
  const std::uint64_t dropout_seed = derive_seed(cfg.seed, {0xD0});
  auto params = result.model.parameters();
  std::uint64_t step = 0;
  std::vector<int> labels;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto epoch_start = std::chrono::steady_clock::now();
    const auto order = epoch_order(train_inputs.size(), cfg.seed, epoch);
    std::size_t correct = 0;
    for (const auto& [b, e] : batches) {
      const std::span<const std::size_t> idx(order.data() + b, e - b);
      if (hooks.on_batch) hooks.on_batch(epoch, idx);
      const auto x = pipeline::make_batch<T>(train_inputs, idx, &labels);
      const auto logits = result.model.logits(x, {nn::Mode::Train, dropout_seed, step});
      const auto probs = nn::softmax(logits);
      const auto weights = result.model.decayed_weights();
      const auto loss = nn::loss<T>(probs, labels, weights, cfg.lambda);
      result.model.backward(nn::cross_entropy_grad(probs, std::span<const int>(labels)));
      const double lr = lr_at(step, cfg.initial_lr(), cfg.decay_rate, cfg.decay_period);
      opt.step(params, lr, cfg.lambda);
      const std::size_t k = probs.dim(1);
      for (std::size_t i = 0; i < labels.size(); ++i) {
        const T* row = probs.data() + i * k;
        if (static_cast<int>(std::max_element(row, row + k) - row) == labels[i]) ++correct;
      }
      hist.steps.push_back({step, lr, loss.total(), loss.data, epoch});
      ++step;
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_acc = static_cast<double>(correct) / static_cast<double>(train_inputs.size());
    if (!test_inputs.empty()) {
      rec.test_acc = accuracy_of(pipeline::predict_probabilities(result.model, test_inputs), test_inputs);
    }
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - epoch_start).count();
    hist.epochs.push_back(rec);
    if (hooks.on_epoch) hooks.on_epoch(rec);
  }
  hist.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

// step,lr,loss,epoch,train_acc,test_acc; the accuracy columns are filled on
// the last step of each epoch.
inline std::string history_csv(const TrainHistory& h) {
  std::string out = "step,lr,loss,epoch,train_acc,test_acc\n";
  char buf[160];
  for (std::size_t i = 0; i < h.steps.size(); ++i) {
    const auto& s = h.steps[i];
    std::snprintf(buf, sizeof(buf), "%llu,%.10g,%.10g,%zu,", static_cast<unsigned long long>(s.step), s.lr,
                  s.loss, s.epoch);
    out += buf;
    const bool last = i + 1 == h.steps.size() || h.steps[i + 1].epoch != s.epoch;
    if (last && s.epoch < h.epochs.size()) {
      const auto& e = h.epochs[s.epoch];
      std::snprintf(buf, sizeof(buf), "%.6f,", e.train_acc);
      out += buf;
      if (e.test_acc) {
        std::snprintf(buf, sizeof(buf), "%.6f", *e.test_acc);
        out += buf;
      }
    } else {
      out += ",";
    }
    out += "\n";
  }
  return out;
}

}  // namespace dramnet::train
