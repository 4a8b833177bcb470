// src/finetune.cc

// Copyright 2026  The DDNN-VAD Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "ddnn/finetune.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "ddnn/eval.h"

namespace ddnn {

namespace {
constexpr std::uint64_t kHeadTag = 0x4000;
constexpr std::uint64_t kRandomInitTag = 0x5000;
constexpr std::uint64_t kShuffleTag = 0x6000;
}  // namespace

void FinetuneConfig::Validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
    throw ConfigError("finetune: learning_rate must be a finite non-negative number");
  if (max_epochs < 0) throw ConfigError("finetune: max_epochs must be >= 0");
  if (batch_size <= 0) throw ConfigError("finetune: batch_size must be positive");
  if (patience < 0) throw ConfigError("finetune: patience must be >= 0");
}

DdnnModel AttachHead(DdnnModel model, std::uint64_t seed) {
  if (model.encoders.empty()) throw ConfigError("cannot attach a head: model has no encoders");
  if (model.has_classifier) throw ConfigError("model already has a classifier head");
  if (model.encoders.size() != model.config.hidden_sizes.size())
    throw ConfigError(StrCat("cannot attach a head: model has ", model.encoders.size(), " of ",
                             model.config.hidden_sizes.size(), " encoder layers"));
  model.config.seed = seed;
  Rng rng(DeriveSeed(seed, kHeadTag));
  model.classifier = InitLayer(1, model.encoders.back().OutputDim(), &rng);
  model.has_classifier = true;
  model.Validate();
  return model;
}

DdnnModel AssembleClassifier(const PretrainState &state, std::uint64_t seed,
                             const NormStats &norm) {
  if (!state.Complete())
    throw ConfigError(StrCat("cannot assemble classifier: pretraining finished ",
                             state.CompletedLevels(), " of ", state.TargetDepth(), " levels"));
  DdnnModel m;
  m.config.input_dim = state.input_dim;
  m.config.hidden_sizes = state.layer_sizes;
  m.encoders = state.noisy_path;
  m.norm = norm;
  m.level_tag = static_cast<std::uint32_t>(state.CompletedLevels());
  return AttachHead(std::move(m), seed);
}

DdnnModel RandomInitClassifier(int input_dim, const std::vector<int> &hidden_sizes,
                               std::uint64_t seed, const NormStats &norm) {
  if (hidden_sizes.empty()) throw ConfigError("random init: need at least one hidden layer");
  DdnnModel m;
  m.config.input_dim = input_dim;
  m.config.hidden_sizes = hidden_sizes;
  m.config.seed = seed;
  Rng rng(DeriveSeed(seed, kRandomInitTag));
  int width = input_dim;
  for (int h : hidden_sizes) {
    m.encoders.push_back(InitLayer(h, width, &rng));
    width = h;
  }
  m.norm = norm;
  return AttachHead(std::move(m), seed);
}

std::string FinetuneLog::ToCsv() const {
  std::string out = "epoch,train_loss,dev_accuracy\n";
  char buf[96];
  for (const auto &e : epochs) {
    if (e.dev_accuracy >= 0)
      std::snprintf(buf, sizeof(buf), "%d,%.10f,%.4f\n", e.epoch, e.train_loss, e.dev_accuracy);
    else
      std::snprintf(buf, sizeof(buf), "%d,%.10f,\n", e.epoch, e.train_loss);
    out += buf;
  }
  return out;
}

DdnnModel Finetune(DdnnModel model, const LabeledBatch &train, const FinetuneConfig &config,
                   const LabeledBatch *dev, FinetuneLog *log) {
  config.Validate();
  model.Validate();
  if (!model.has_classifier) throw ConfigError("finetune: model has no classifier head");
  const Eigen::Index n = train.inputs.cols();
  if (n == 0) throw DataError("finetune: empty training set");
  CheckDim(static_cast<std::int64_t>(train.labels.size()), n, "finetune labels");
  CheckDim(train.inputs.rows(), model.InputDim(), "finetune input width");

  Rng rng(DeriveSeed(config.seed, kShuffleTag));
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Matrix xb;
  std::vector<int> yb;
  double best_dev = -1.0;
  int since_best = 0;
  DdnnModel best = model;

  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    for (Eigen::Index b = 0; b < n; b += config.batch_size) {
      const Eigen::Index e = std::min<Eigen::Index>(n, b + config.batch_size);
      xb.resize(train.inputs.rows(), e - b);
      yb.resize(e - b);
      for (Eigen::Index i = b; i < e; ++i) {
        xb.col(i - b) = train.inputs.col(order[i]);
        yb[i - b] = train.labels[order[i]];
      }
      const auto g = ClassifierGrad(model, xb, yb);
      if (!std::isfinite(g.loss))
        throw NumericalError(StrCat("finetune: non-finite loss at epoch ", epoch + 1));
      loss_sum += g.loss * static_cast<double>(e - b);
      SgdStep(&model, g, EffectiveStep(config.learning_rate, config.reduction, e - b));
    }
    EpochRecord rec{epoch + 1, loss_sum / static_cast<double>(n), -1.0};
    if (dev && dev->inputs.cols() > 0) {
      const Vector scores = ModelForward(model, dev->inputs);
      std::vector<int> decisions(scores.size());
      for (Eigen::Index i = 0; i < scores.size(); ++i)
        decisions[i] = scores[i] >= kDecisionThreshold ? 1 : 0;
      rec.dev_accuracy = Accuracy(decisions, dev->labels);
    }
    if (log) log->epochs.push_back(rec);

    if (config.patience > 0 && rec.dev_accuracy >= 0) {
      if (rec.dev_accuracy > best_dev) {
        best_dev = rec.dev_accuracy;
        best = model;
        since_best = 0;
      } else if (++since_best >= config.patience) {
        return best;
      }
    }
  }
  if (config.patience > 0 && best_dev >= 0) return best;
  return model;
}

Prediction PredictFrame(const DdnnModel &model, const Vector &features) {
  CheckDim(features.size(), model.InputDim(), "PredictFrame input");
  const double score = ModelForward(model, Matrix(features))[0];
  return {score, score >= kDecisionThreshold ? 1 : 0};
}

std::vector<Prediction> PredictBatch(const DdnnModel &model, const Matrix &features) {
  // Column by column so that results match PredictFrame bit for bit
  // (a wide GEMM may sum in a different order than the single-column path).
  std::vector<Prediction> out;
  out.reserve(features.cols());
  for (Eigen::Index i = 0; i < features.cols(); ++i)
    out.push_back(PredictFrame(model, features.col(i)));
  return out;
}

std::vector<int> Decisions(const std::vector<Prediction> &predictions) {
  std::vector<int> d(predictions.size());
  std::transform(predictions.begin(), predictions.end(), d.begin(),
                 [](const Prediction &p) { return p.decision; });
  return d;
}

}  // namespace ddnn
