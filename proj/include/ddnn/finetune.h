// include/ddnn/finetune.h

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

#ifndef DDNN_FINETUNE_H_
#define DDNN_FINETUNE_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ddnn/network.h"
#include "ddnn/pretrain.h"

namespace ddnn {

struct FinetuneConfig {
  double learning_rate = 0.005;
  int max_epochs = 130;
  int batch_size = 512;
  std::uint64_t seed = 1;
  BatchReduction reduction = BatchReduction::kMean;
  // Stop after this many epochs without a dev-accuracy gain; 0 disables
  // early stopping (fixed epoch count).
  int patience = 0;

  void Validate() const;
};

// Encoders theta^(1..L) copied from `state` plus a freshly initialized head;
// the clean path and all decoders are left behind.
DdnnModel AssembleClassifier(const PretrainState &state, std::uint64_t seed,
                             const NormStats &norm = {});

// Adds a freshly initialized classifier head to an encoder-only model. The
// head depends only on `seed`, so AssembleClassifier(state, seed) equals
// AttachHead(CheckpointModel(state, ...), seed) apart from the level tag.
DdnnModel AttachHead(DdnnModel model, std::uint64_t seed);

// Same shape as AssembleClassifier but every layer randomly initialized.
DdnnModel RandomInitClassifier(int input_dim, const std::vector<int> &hidden_sizes,
                               std::uint64_t seed, const NormStats &norm = {});

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double dev_accuracy = -1.0;  // negative when no dev set was given
};

struct FinetuneLog {
  std::vector<EpochRecord> epochs;
  std::string ToCsv() const;
};

// Labelled examples, one per column, already normalized.
struct LabeledBatch {
  Matrix inputs;
  std::vector<int> labels;
};

// Minibatch SGD on the mean classification loss, updating every layer.
DdnnModel Finetune(DdnnModel model, const LabeledBatch &train,
                   const FinetuneConfig &config, const LabeledBatch *dev = nullptr,
                   FinetuneLog *log = nullptr);

struct Prediction {
  double score = 0.0;
  int decision = 0;  // 1 = speech (H1)
};

inline constexpr double kDecisionThreshold = 0.5;

// H1 iff score >= 0.5.
Prediction PredictFrame(const DdnnModel &model, const Vector &features);
// One prediction per column.
std::vector<Prediction> PredictBatch(const DdnnModel &model, const Matrix &features);
std::vector<int> Decisions(const std::vector<Prediction> &predictions);

}  // namespace ddnn

#endif  // DDNN_FINETUNE_H_
