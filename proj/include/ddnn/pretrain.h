// include/ddnn/pretrain.h

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

#ifndef DDNN_PRETRAIN_H_
#define DDNN_PRETRAIN_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ddnn/common.h"
#include "ddnn/network.h"

namespace ddnn {

enum class CleanPretrainer { kAutoencoder, kCd1 };
CleanPretrainer ParseCleanPretrainer(const std::string &name);
std::string CleanPretrainerName(CleanPretrainer p);

struct PretrainConfig {
  std::vector<int> layer_sizes = {54, 7, 7};
  double learning_rate = 0.004;
  int max_epochs = 200;
  int batch_size = 512;
  std::uint64_t seed = 1;
  BatchReduction reduction = BatchReduction::kMean;
  CleanPretrainer clean_pretrainer = CleanPretrainer::kAutoencoder;

  int Depth() const { return static_cast<int>(layer_sizes.size()); }
  void Validate() const;
};

// Per-epoch mean reconstruction loss of one greedy training run.
struct LevelTrace {
  int level = 0;
  bool clean_path = false;
  std::vector<double> epoch_loss;
};

// Parameter stacks of the denoising pretraining. Data matrices passed to
// the functions below hold one example per column.
struct PretrainState {
  int input_dim = 0;
  std::vector<int> layer_sizes;
  std::vector<LayerParams> noisy_path;  // completed encoders theta^(1..l)
  std::vector<LayerParams> clean_path;  // completed clean encoders
  int noisy_trainings = 0;
  int clean_trainings = 0;
  std::vector<LevelTrace> traces;

  int CompletedLevels() const { return static_cast<int>(noisy_path.size()); }
  int TargetDepth() const { return static_cast<int>(layer_sizes.size()); }
  bool Complete() const { return CompletedLevels() == TargetDepth(); }
  // Width of x^(level): input_dim for level 0.
  int WidthAt(int level) const;
  bool operator==(const PretrainState &other) const;
};

PretrainState InitPretrainState(int input_dim, const PretrainConfig &config);

// x^(upto) = f^(upto)( ... f^(1)(x0)); upto = 0 is the identity.
Matrix PropagateNoisy(const PretrainState &state, const Matrix &x0, int upto);
Vector PropagateNoisy(const PretrainState &state, const Vector &x0, int upto);
// Same over the clean-to-clean encoders.
Matrix PropagateClean(const PretrainState &state, const Matrix &x0, int upto);
Vector PropagateClean(const PretrainState &state, const Vector &x0, int upto);

struct AutoencoderFit {
  LayerParams encoder;
  LayerParams decoder;
  std::vector<double> epoch_loss;
};

// Minibatch SGD on sum_i L(target_i; g(f(input_i))). Shuffles every epoch;
// the final partial batch is kept. `tag` names the run in diagnostics.
AutoencoderFit TrainAutoencoder(const Matrix &inputs, const Matrix &targets,
                                int hidden, const PretrainConfig &config,
                                std::uint64_t stream_seed, const std::string &tag);

// Trains theta^(l) for l = CompletedLevels() + 1 on (x^(l-1), x~^(l-1)); the
// decoder is discarded.
void PretrainLevel(const Matrix &inputs, const Matrix &targets,
                   PretrainState *state, const PretrainConfig &config);

// Trains the next clean-path encoder as a plain autoencoder (input = target).
void PretrainCleanLevel(const Matrix &clean_inputs, PretrainState *state,
                        const PretrainConfig &config);

struct Rbm {
  LayerParams hidden;  // W (hidden x visible), hidden bias
  Vector visible_bias;
  std::vector<double> epoch_error;  // mean squared reconstruction error
};

// F(v) = -b_v.v - sum_j log(1 + exp(W_j v + c_j)).
double FreeEnergy(const Rbm &rbm, const Vector &visible);

// One RBM with real-valued visibles in [0,1] and Bernoulli hiddens, trained
// with single-step contrastive divergence.
Rbm Cd1PretrainLevel(const Matrix &frames, int hidden, const PretrainConfig &config,
                     std::uint64_t stream_seed);

using LevelCallback = std::function<void(const PretrainState &)>;

// Full greedy schedule. For l = 1..L: x^(l-1) via the noisy encoders; for
// l > 1 the clean encoder l-1 is trained on x~^(l-2) and x~^(l-1) computed;
// then theta^(l) is trained on (x^(l-1), x~^(l-1)).
PretrainState RunPretraining(const Matrix &noisy, const Matrix &clean,
                             const PretrainConfig &config,
                             const LevelCallback &on_level = {});

// Deep-belief baseline: stacked CD-1 RBMs on the noisy input only.
PretrainState RunDbnPretraining(const Matrix &noisy, const PretrainConfig &config,
                                const LevelCallback &on_level = {});

// Encoders of `state` packaged in the model container (no head), tagged
// with the number of completed levels.
DdnnModel CheckpointModel(const PretrainState &state, const PretrainConfig &config);

}  // namespace ddnn

#endif  // DDNN_PRETRAIN_H_
