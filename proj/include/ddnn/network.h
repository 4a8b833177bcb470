// include/ddnn/network.h

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

#ifndef DDNN_NETWORK_H_
#define DDNN_NETWORK_H_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ddnn/common.h"
#include "ddnn/norm-stats.h"

namespace ddnn {

// Probabilities are clamped to [kProbFloor, 1 - kProbFloor] before logs.
inline constexpr double kProbFloor = 1e-7;

// One affine layer, out = s(W in + b). Rows of W are output units.
struct LayerParams {
  Matrix weights;
  Vector bias;

  LayerParams() = default;
  LayerParams(int output_dim, int input_dim)
      : weights(Matrix::Zero(output_dim, input_dim)),
        bias(Vector::Zero(output_dim)) {}

  int InputDim() const { return static_cast<int>(weights.cols()); }
  int OutputDim() const { return static_cast<int>(weights.rows()); }
  bool AllFinite() const { return weights.allFinite() && bias.allFinite(); }
  bool operator==(const LayerParams &other) const;
};

// Glorot-uniform weights, zero bias.
LayerParams InitLayer(int output_dim, int input_dim, Rng *rng);

double Logistic(double x);
double ClampProb(double p);

Vector LayerForward(const LayerParams &layer, const Vector &input);
// Columns of `inputs` are examples.
Matrix LayerForwardBatch(const LayerParams &layer, const Matrix &inputs);

// L(x; z) = -sum_d x_d log z_d + (1 - x_d) log(1 - z_d).
double ReconstructionLoss(const Vector &target, const Vector &reconstruction);
// Sum of per-column reconstruction losses.
double ReconstructionLossBatch(const Matrix &targets,
                               const Matrix &reconstructions);
// Binary cross-entropy; label 1 is speech (H1).
double ClassificationLoss(int label, double score);

struct AutoencoderGradients {
  LayerParams encoder;
  LayerParams decoder;
  double loss = 0.0;  // mean per-example reconstruction loss
};

// Exact gradient of ReconstructionLoss(target, g(f(input))) for one example.
AutoencoderGradients AutoencoderGrad(const LayerParams &encoder,
                                     const LayerParams &decoder,
                                     const Vector &input,
                                     const Vector &target);

// Mean-over-batch gradient; columns are examples.
AutoencoderGradients AutoencoderBatchGrad(const LayerParams &encoder,
                                          const LayerParams &decoder,
                                          const Matrix &inputs,
                                          const Matrix &targets);

void SgdStep(LayerParams *params, const LayerParams &grads,
             double learning_rate);

// How a minibatch's mean gradient is turned into an update. kSum steps along
// the gradient of the summed batch objective (lr * B * mean); kMean steps
// along the mean itself.
enum class BatchReduction { kSum, kMean };

inline double EffectiveStep(double learning_rate, BatchReduction reduction,
                            Eigen::Index batch_size) {
  return reduction == BatchReduction::kSum
             ? learning_rate * static_cast<double>(batch_size)
             : learning_rate;
}

BatchReduction ParseBatchReduction(const std::string &name);
std::string BatchReductionName(BatchReduction reduction);

struct NetworkConfig {
  int input_dim = 0;
  std::vector<int> hidden_sizes;
  std::uint64_t seed = 0;
};

// Stacked encoders plus a single-unit logistic classifier head.
struct DdnnModel {
  NetworkConfig config;
  std::vector<LayerParams> encoders;
  LayerParams classifier;
  bool has_classifier = false;
  NormStats norm;
  // Number of completed pretraining levels at the time the file was written.
  std::uint32_t level_tag = 0;

  int Depth() const { return static_cast<int>(encoders.size()); }
  int InputDim() const { return config.input_dim; }
  // Widths input -> hidden... -> 1 (head only when present).
  std::vector<int> LayerWidths() const;
  void Validate() const;
  bool operator==(const DdnnModel &other) const;
};

// Per-layer post-activations; entry 0 is the input batch, the last entry is
// the classifier output (1 x B).
struct ActivationRecord {
  std::vector<Matrix> activations;
};

// Returns the H1 probability for every column of `inputs`.
Vector ModelForward(const DdnnModel &model, const Matrix &inputs,
                    ActivationRecord *record = nullptr);

struct ModelGradients {
  std::vector<LayerParams> encoders;
  LayerParams classifier;
  double loss = 0.0;  // mean classification loss over the batch
};

// Mean-over-batch gradient of ClassificationLoss through every layer.
ModelGradients ClassifierGrad(const DdnnModel &model, const Matrix &inputs,
                              std::span<const int> labels);

void SgdStep(DdnnModel *model, const ModelGradients &grads,
             double learning_rate);

// Binary container; see docs/FORMATS.md.
inline constexpr std::uint32_t kModelFormatVersion = 1;
void WriteModel(const DdnnModel &model, std::ostream &os);
DdnnModel ReadModel(std::istream &is);
void WriteModelFile(const DdnnModel &model, const std::string &path);
DdnnModel ReadModelFile(const std::string &path);

}  // namespace ddnn

#endif  // DDNN_NETWORK_H_
