// src/pretrain.cc

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

#include "ddnn/pretrain.h"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ddnn {

namespace {

// Stream tags for DeriveSeed.
constexpr std::uint64_t kNoisyInitTag = 0x1000;
constexpr std::uint64_t kCleanInitTag = 0x2000;
constexpr std::uint64_t kRbmTag = 0x3000;

std::vector<Eigen::Index> Iota(Eigen::Index n) {
  std::vector<Eigen::Index> v(n);
  std::iota(v.begin(), v.end(), Eigen::Index{0});
  return v;
}

void GatherColumns(const Matrix &src, const std::vector<Eigen::Index> &order,
                   Eigen::Index begin, Eigen::Index end, Matrix *dst) {
  dst->resize(src.rows(), end - begin);
  for (Eigen::Index i = begin; i < end; ++i) dst->col(i - begin) = src.col(order[i]);
}

Matrix PropagateThrough(const std::vector<LayerParams> &path, const Matrix &x0,
                        int upto, const char *which) {
  if (upto < 0 || upto > static_cast<int>(path.size()))
    throw DataError(StrCat("propagate ", which, ": level ", upto,
                           " not available (", path.size(), " completed)"));
  Matrix x = x0;
  for (int l = 0; l < upto; ++l) x = LayerForwardBatch(path[l], x);
  return x;
}

}  // namespace

CleanPretrainer ParseCleanPretrainer(const std::string &name) {
  if (name == "autoencoder") return CleanPretrainer::kAutoencoder;
  if (name == "cd1") return CleanPretrainer::kCd1;
  throw ConfigError(StrCat("unknown clean pretrainer '", name, "' (autoencoder|cd1)"));
}

std::string CleanPretrainerName(CleanPretrainer p) {
  return p == CleanPretrainer::kAutoencoder ? "autoencoder" : "cd1";
}

void PretrainConfig::Validate() const {
  if (layer_sizes.empty()) throw ConfigError("pretrain: layer_sizes must not be empty");
  for (int h : layer_sizes)
    if (h <= 0) throw ConfigError("pretrain: layer sizes must be positive");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
    throw ConfigError("pretrain: learning_rate must be a finite non-negative number");
  if (max_epochs < 0) throw ConfigError("pretrain: max_epochs must be >= 0");
  if (batch_size <= 0) throw ConfigError("pretrain: batch_size must be positive");
}

int PretrainState::WidthAt(int level) const {
  return level == 0 ? input_dim : layer_sizes.at(level - 1);
}

bool PretrainState::operator==(const PretrainState &o) const {
  if (input_dim != o.input_dim || layer_sizes != o.layer_sizes ||
      noisy_path != o.noisy_path || clean_path != o.clean_path ||
      noisy_trainings != o.noisy_trainings || clean_trainings != o.clean_trainings ||
      traces.size() != o.traces.size())
    return false;
  for (std::size_t i = 0; i < traces.size(); ++i)
    if (traces[i].level != o.traces[i].level ||
        traces[i].clean_path != o.traces[i].clean_path ||
        traces[i].epoch_loss != o.traces[i].epoch_loss)
      return false;
  return true;
}

PretrainState InitPretrainState(int input_dim, const PretrainConfig &config) {
  config.Validate();
  if (input_dim <= 0) throw ConfigError("pretrain: input dimension must be positive");
  PretrainState s;
  s.input_dim = input_dim;
  s.layer_sizes = config.layer_sizes;
  return s;
}

Matrix PropagateNoisy(const PretrainState &state, const Matrix &x0, int upto) {
  CheckDim(x0.rows(), state.input_dim, "PropagateNoisy input");
  return PropagateThrough(state.noisy_path, x0, upto, "noisy");
}

Vector PropagateNoisy(const PretrainState &state, const Vector &x0, int upto) {
  return PropagateNoisy(state, Matrix(x0), upto).col(0);
}

Matrix PropagateClean(const PretrainState &state, const Matrix &x0, int upto) {
  CheckDim(x0.rows(), state.input_dim, "PropagateClean input");
  return PropagateThrough(state.clean_path, x0, upto, "clean");
}

Vector PropagateClean(const PretrainState &state, const Vector &x0, int upto) {
  return PropagateClean(state, Matrix(x0), upto).col(0);
}

AutoencoderFit TrainAutoencoder(const Matrix &inputs, const Matrix &targets,
                                int hidden, const PretrainConfig &config,
                                std::uint64_t stream_seed, const std::string &tag) {
  config.Validate();
  const Eigen::Index n = inputs.cols();
  if (n == 0) throw DataError(StrCat(tag, ": empty training stream"));
  CheckDim(targets.cols(), n, "autoencoder targets");

  Rng rng(stream_seed);
  AutoencoderFit fit;
  fit.encoder = InitLayer(hidden, static_cast<int>(inputs.rows()), &rng);
  fit.decoder = InitLayer(static_cast<int>(targets.rows()), hidden, &rng);

  auto order = Iota(n);
  Matrix xb, tb;
  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    for (Eigen::Index b = 0; b < n; b += config.batch_size) {
      const Eigen::Index e = std::min<Eigen::Index>(n, b + config.batch_size);
      GatherColumns(inputs, order, b, e, &xb);
      GatherColumns(targets, order, b, e, &tb);
      const auto g = AutoencoderBatchGrad(fit.encoder, fit.decoder, xb, tb);
      if (!std::isfinite(g.loss))
        throw NumericalError(StrCat(tag, ": non-finite reconstruction loss at epoch ",
                                    epoch + 1, " batch starting ", b));
      loss_sum += g.loss * static_cast<double>(e - b);
      const double step = EffectiveStep(config.learning_rate, config.reduction, e - b);
      SgdStep(&fit.encoder, g.encoder, step);
      SgdStep(&fit.decoder, g.decoder, step);
    }
    if (!fit.encoder.AllFinite() || !fit.decoder.AllFinite())
      throw NumericalError(StrCat(tag, ": parameters diverged at epoch ", epoch + 1,
                                  " (try a smaller learning rate)"));
    fit.epoch_loss.push_back(loss_sum / static_cast<double>(n));
  }
  return fit;
}

void PretrainLevel(const Matrix &inputs, const Matrix &targets, PretrainState *state,
                   const PretrainConfig &config) {
  const int level = state->CompletedLevels() + 1;
  if (level > state->TargetDepth())
    throw ConfigError(StrCat("pretrain: all ", state->TargetDepth(), " levels already trained"));
  CheckDim(inputs.rows(), state->WidthAt(level - 1), "pretrain level input");
  CheckDim(targets.rows(), state->WidthAt(level - 1), "pretrain level target");
  auto fit = TrainAutoencoder(inputs, targets, state->layer_sizes[level - 1], config,
                              DeriveSeed(config.seed, kNoisyInitTag + level),
                              StrCat("noisy level ", level));
  state->noisy_path.push_back(std::move(fit.encoder));
  state->noisy_trainings++;
  state->traces.push_back({level, false, std::move(fit.epoch_loss)});
}

void PretrainCleanLevel(const Matrix &clean_inputs, PretrainState *state,
                        const PretrainConfig &config) {
  const int level = static_cast<int>(state->clean_path.size()) + 1;
  if (level >= state->TargetDepth())
    throw ConfigError(StrCat("pretrain: clean path needs only ", state->TargetDepth() - 1,
                             " levels"));
  CheckDim(clean_inputs.rows(), state->WidthAt(level - 1), "clean level input");
  const int hidden = state->layer_sizes[level - 1];
  const std::uint64_t seed = DeriveSeed(config.seed, kCleanInitTag + level);
  if (config.clean_pretrainer == CleanPretrainer::kCd1) {
    auto rbm = Cd1PretrainLevel(clean_inputs, hidden, config, seed);
    state->clean_path.push_back(std::move(rbm.hidden));
    state->traces.push_back({level, true, std::move(rbm.epoch_error)});
  } else {
    auto fit = TrainAutoencoder(clean_inputs, clean_inputs, hidden, config, seed,
                                StrCat("clean level ", level));
    state->clean_path.push_back(std::move(fit.encoder));
    state->traces.push_back({level, true, std::move(fit.epoch_loss)});
  }
  state->clean_trainings++;
}

double FreeEnergy(const Rbm &rbm, const Vector &v) {
  CheckDim(v.size(), rbm.hidden.InputDim(), "FreeEnergy visible");
  const Vector act = rbm.hidden.weights * v + rbm.hidden.bias;
  double f = -rbm.visible_bias.dot(v);
  for (Eigen::Index j = 0; j < act.size(); ++j) {
    const double a = act[j];
    // log(1 + e^a) without overflow
    f -= a > 0 ? a + std::log1p(std::exp(-a)) : std::log1p(std::exp(a));
  }
  return f;
}

Rbm Cd1PretrainLevel(const Matrix &frames, int hidden, const PretrainConfig &config,
                     std::uint64_t stream_seed) {
  config.Validate();
  const Eigen::Index n = frames.cols();
  if (n == 0) throw DataError("CD-1: empty training stream");
  Rng rng(stream_seed);
  Rbm rbm;
  rbm.hidden = InitLayer(hidden, static_cast<int>(frames.rows()), &rng);
  rbm.visible_bias = Vector::Zero(frames.rows());
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  auto order = Iota(n);
  Matrix v0, h0s;
  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double err = 0.0;
    for (Eigen::Index b = 0; b < n; b += config.batch_size) {
      const Eigen::Index e = std::min<Eigen::Index>(n, b + config.batch_size);
      const Eigen::Index bs = e - b;
      GatherColumns(frames, order, b, e, &v0);
      const Matrix h0 = LayerForwardBatch(rbm.hidden, v0);
      h0s.resize(h0.rows(), h0.cols());
      for (Eigen::Index c = 0; c < h0.cols(); ++c)
        for (Eigen::Index r = 0; r < h0.rows(); ++r)
          h0s(r, c) = unif(rng) < h0(r, c) ? 1.0 : 0.0;
      Matrix v1 = rbm.hidden.weights.transpose() * h0s;
      v1.colwise() += rbm.visible_bias;
      v1 = v1.unaryExpr([](double x) { return Logistic(x); });
      const Matrix h1 = LayerForwardBatch(rbm.hidden, v1);

      err += (v0 - v1).squaredNorm();
      const double inv = 1.0 / static_cast<double>(bs);
      const double step = EffectiveStep(config.learning_rate, config.reduction, bs);
      rbm.hidden.weights += step * inv * (h0 * v0.transpose() - h1 * v1.transpose());
      rbm.hidden.bias += step * inv * (h0 - h1).rowwise().sum();
      rbm.visible_bias += step * inv * (v0 - v1).rowwise().sum();
    }
    if (!rbm.hidden.AllFinite() || !rbm.visible_bias.allFinite())
      throw NumericalError(StrCat("CD-1: parameters diverged at epoch ", epoch + 1));
    rbm.epoch_error.push_back(err / static_cast<double>(n));
  }
  return rbm;
}

PretrainState RunPretraining(const Matrix &noisy, const Matrix &clean,
                             const PretrainConfig &config, const LevelCallback &on_level) {
  CheckDim(clean.rows(), noisy.rows(), "pretraining clean width");
  CheckDim(clean.cols(), noisy.cols(), "pretraining frame count");
  if (noisy.cols() == 0) throw DataError("pretraining: empty corpus");
  PretrainState state = InitPretrainState(static_cast<int>(noisy.rows()), config);

  Matrix x = noisy;   // x^(l-1)
  Matrix xt = clean;  // x~^(l-1)
  for (int l = 1; l <= config.Depth(); ++l) {
    if (l > 1) {
      x = LayerForwardBatch(state.noisy_path[l - 2], x);
      PretrainCleanLevel(xt, &state, config);
      xt = LayerForwardBatch(state.clean_path[l - 2], xt);
    }
    PretrainLevel(x, xt, &state, config);
    if (on_level) on_level(state);
  }
  return state;
}

PretrainState RunDbnPretraining(const Matrix &noisy, const PretrainConfig &config,
                                const LevelCallback &on_level) {
  if (noisy.cols() == 0) throw DataError("DBN pretraining: empty corpus");
  PretrainState state = InitPretrainState(static_cast<int>(noisy.rows()), config);
  Matrix x = noisy;
  for (int l = 1; l <= config.Depth(); ++l) {
    auto rbm = Cd1PretrainLevel(x, config.layer_sizes[l - 1], config,
                                DeriveSeed(config.seed, kRbmTag + l));
    x = LayerForwardBatch(rbm.hidden, x);
    state.noisy_path.push_back(std::move(rbm.hidden));
    state.noisy_trainings++;
    state.traces.push_back({l, false, std::move(rbm.epoch_error)});
    if (on_level) on_level(state);
  }
  return state;
}

DdnnModel CheckpointModel(const PretrainState &state, const PretrainConfig &config) {
  DdnnModel m;
  m.config.input_dim = state.input_dim;
  m.config.hidden_sizes = state.layer_sizes;
  m.config.seed = config.seed;
  m.encoders = state.noisy_path;
  m.level_tag = static_cast<std::uint32_t>(state.CompletedLevels());
  return m;
}

}  // namespace ddnn
