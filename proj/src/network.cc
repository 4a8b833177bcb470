// src/network.cc

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

#include "ddnn/network.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace ddnn {

bool LayerParams::operator==(const LayerParams &other) const {
  return weights.rows() == other.weights.rows() &&
         weights.cols() == other.weights.cols() &&
         bias.size() == other.bias.size() && weights == other.weights &&
         bias == other.bias;
}

LayerParams InitLayer(int output_dim, int input_dim, Rng *rng) {
  if (output_dim <= 0 || input_dim <= 0)
    throw ConfigError(StrCat("InitLayer: widths must be positive (", output_dim,
                             "x", input_dim, ")"));
  LayerParams layer(output_dim, input_dim);
  const double r = std::sqrt(6.0 / (input_dim + output_dim));
  std::uniform_real_distribution<double> dist(-r, r);
  // Row-major fill order so the draw sequence matches the file layout.
  for (int i = 0; i < output_dim; ++i)
    for (int j = 0; j < input_dim; ++j) layer.weights(i, j) = dist(*rng);
  return layer;
}

double Logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double ClampProb(double p) {
  return std::clamp(p, kProbFloor, 1.0 - kProbFloor);
}

Vector LayerForward(const LayerParams &layer, const Vector &input) {
  CheckDim(input.size(), layer.InputDim(), "LayerForward input");
  Vector out = layer.weights * input + layer.bias;
  return out.unaryExpr([](double v) { return Logistic(v); });
}

Matrix LayerForwardBatch(const LayerParams &layer, const Matrix &inputs) {
  CheckDim(inputs.rows(), layer.InputDim(), "LayerForwardBatch input");
  Matrix out = layer.weights * inputs;
  out.colwise() += layer.bias;
  return out.unaryExpr([](double v) { return Logistic(v); });
}

double ReconstructionLoss(const Vector &target, const Vector &reconstruction) {
  CheckDim(reconstruction.size(), target.size(), "ReconstructionLoss");
  double loss = 0.0;
  for (Eigen::Index d = 0; d < target.size(); ++d) {
    const double z = ClampProb(reconstruction[d]);
    const double x = target[d];
    loss -= x * std::log(z) + (1.0 - x) * std::log(1.0 - z);
  }
  return loss;
}

double ReconstructionLossBatch(const Matrix &targets,
                               const Matrix &reconstructions) {
  CheckDim(reconstructions.rows(), targets.rows(), "ReconstructionLossBatch rows");
  CheckDim(reconstructions.cols(), targets.cols(), "ReconstructionLossBatch cols");
  double loss = 0.0;
  for (Eigen::Index c = 0; c < targets.cols(); ++c) {
    for (Eigen::Index d = 0; d < targets.rows(); ++d) {
      const double z = ClampProb(reconstructions(d, c));
      const double x = targets(d, c);
      loss -= x * std::log(z) + (1.0 - x) * std::log(1.0 - z);
    }
  }
  return loss;
}

double ClassificationLoss(int label, double score) {
  const double p = ClampProb(score);
  return label == 1 ? -std::log(p) : -std::log(1.0 - p);
}

AutoencoderGradients AutoencoderBatchGrad(const LayerParams &encoder,
                                          const LayerParams &decoder,
                                          const Matrix &inputs,
                                          const Matrix &targets) {
  CheckDim(decoder.InputDim(), encoder.OutputDim(), "autoencoder decoder input");
  CheckDim(targets.rows(), decoder.OutputDim(), "autoencoder target");
  CheckDim(targets.cols(), inputs.cols(), "autoencoder batch size");
  if (inputs.cols() == 0) throw DataError("AutoencoderBatchGrad: empty batch");
  const double inv_n = 1.0 / static_cast<double>(inputs.cols());

  const Matrix hidden = LayerForwardBatch(encoder, inputs);
  const Matrix recon = LayerForwardBatch(decoder, hidden);

  AutoencoderGradients g;
  g.loss = ReconstructionLossBatch(targets, recon) * inv_n;

  // Logistic output with cross-entropy: output delta is (z - target).
  const Matrix out_delta = recon - targets;
  g.decoder.weights = out_delta * hidden.transpose() * inv_n;
  g.decoder.bias = out_delta.rowwise().sum() * inv_n;

  const Matrix hidden_delta =
      (decoder.weights.transpose() * out_delta)
          .cwiseProduct(hidden.cwiseProduct((1.0 - hidden.array()).matrix()));
  g.encoder.weights = hidden_delta * inputs.transpose() * inv_n;
  g.encoder.bias = hidden_delta.rowwise().sum() * inv_n;
  return g;
}

AutoencoderGradients AutoencoderGrad(const LayerParams &encoder,
                                     const LayerParams &decoder,
                                     const Vector &input,
                                     const Vector &target) {
  CheckDim(input.size(), encoder.InputDim(), "AutoencoderGrad input");
  return AutoencoderBatchGrad(encoder, decoder, Matrix(input), Matrix(target));
}

void SgdStep(LayerParams *params, const LayerParams &grads,
             double learning_rate) {
  CheckDim(grads.weights.rows(), params->weights.rows(), "SgdStep weight rows");
  CheckDim(grads.weights.cols(), params->weights.cols(), "SgdStep weight cols");
  CheckDim(grads.bias.size(), params->bias.size(), "SgdStep bias");
  params->weights -= learning_rate * grads.weights;
  params->bias -= learning_rate * grads.bias;
}

BatchReduction ParseBatchReduction(const std::string &name) {
  if (name == "sum") return BatchReduction::kSum;
  if (name == "mean") return BatchReduction::kMean;
  throw ConfigError(StrCat("unknown batch reduction '", name, "' (sum|mean)"));
}

std::string BatchReductionName(BatchReduction reduction) {
  return reduction == BatchReduction::kSum ? "sum" : "mean";
}

std::vector<int> DdnnModel::LayerWidths() const {
  std::vector<int> widths{config.input_dim};
  for (const auto &layer : encoders) widths.push_back(layer.OutputDim());
  if (has_classifier) widths.push_back(classifier.OutputDim());
  return widths;
}

void DdnnModel::Validate() const {
  if (config.input_dim <= 0) throw DataError("model: input_dim must be positive");
  if (encoders.size() > config.hidden_sizes.size())
    throw DataError("model: more encoder layers than configured hidden sizes");
  int width = config.input_dim;
  for (std::size_t l = 0; l < encoders.size(); ++l) {
    CheckDim(encoders[l].InputDim(), width, "model encoder input");
    CheckDim(encoders[l].OutputDim(), config.hidden_sizes[l],
             "model encoder output");
    CheckDim(encoders[l].bias.size(), encoders[l].OutputDim(), "model encoder bias");
    width = encoders[l].OutputDim();
  }
  if (has_classifier) {
    CheckDim(classifier.InputDim(), width, "model classifier input");
    CheckDim(classifier.OutputDim(), 1, "model classifier output");
    CheckDim(classifier.bias.size(), 1, "model classifier bias");
  }
  if (!norm.Empty()) {
    CheckDim(norm.min.size(), config.input_dim, "model norm min");
    CheckDim(norm.max.size(), config.input_dim, "model norm max");
  }
}

bool DdnnModel::operator==(const DdnnModel &other) const {
  auto same_vec = [](const Vector &a, const Vector &b) {
    return a.size() == b.size() && a == b;
  };
  return config.input_dim == other.config.input_dim &&
         config.hidden_sizes == other.config.hidden_sizes &&
         config.seed == other.config.seed && encoders == other.encoders &&
         has_classifier == other.has_classifier &&
         (!has_classifier || classifier == other.classifier) &&
         same_vec(norm.min, other.norm.min) &&
         same_vec(norm.max, other.norm.max) && level_tag == other.level_tag;
}

Vector ModelForward(const DdnnModel &model, const Matrix &inputs,
                    ActivationRecord *record) {
  if (!model.has_classifier)
    throw DataError("ModelForward: model has no classifier head");
  CheckDim(inputs.rows(), model.InputDim(), "ModelForward input");
  Matrix act = inputs;
  if (record) {
    record->activations.clear();
    record->activations.push_back(inputs);
  }
  for (const auto &layer : model.encoders) {
    act = LayerForwardBatch(layer, act);
    if (record) record->activations.push_back(act);
  }
  act = LayerForwardBatch(model.classifier, act);
  if (record) record->activations.push_back(act);
  return act.row(0).transpose();
}

ModelGradients ClassifierGrad(const DdnnModel &model, const Matrix &inputs,
                              std::span<const int> labels) {
  if (inputs.cols() == 0) throw DataError("ClassifierGrad: empty batch");
  CheckDim(static_cast<std::int64_t>(labels.size()), inputs.cols(),
           "ClassifierGrad labels");
  ActivationRecord rec;
  const Vector scores = ModelForward(model, inputs, &rec);
  const double inv_n = 1.0 / static_cast<double>(inputs.cols());

  ModelGradients g;
  Matrix delta(1, inputs.cols());
  for (Eigen::Index i = 0; i < inputs.cols(); ++i) {
    const int y = labels[i];
    g.loss += ClassificationLoss(y, scores[i]);
    delta(0, i) = scores[i] - static_cast<double>(y);
  }
  g.loss *= inv_n;

  const int depth = model.Depth();
  const Matrix &top_hidden = rec.activations[depth];
  g.classifier.weights = delta * top_hidden.transpose() * inv_n;
  g.classifier.bias = delta.rowwise().sum() * inv_n;

  g.encoders.resize(depth);
  const LayerParams *above = &model.classifier;
  for (int l = depth - 1; l >= 0; --l) {
    const Matrix &out = rec.activations[l + 1];
    const Matrix &in = rec.activations[l];
    delta = (above->weights.transpose() * delta)
                .cwiseProduct(out.cwiseProduct((1.0 - out.array()).matrix()));
    g.encoders[l].weights = delta * in.transpose() * inv_n;
    g.encoders[l].bias = delta.rowwise().sum() * inv_n;
    above = &model.encoders[l];
  }
  return g;
}

void SgdStep(DdnnModel *model, const ModelGradients &grads,
             double learning_rate) {
  CheckDim(static_cast<std::int64_t>(grads.encoders.size()), model->Depth(),
           "SgdStep encoder count");
  for (int l = 0; l < model->Depth(); ++l)
    SgdStep(&model->encoders[l], grads.encoders[l], learning_rate);
  SgdStep(&model->classifier, grads.classifier, learning_rate);
}

// --- serialization -------------------------------------------------------

namespace {

static_assert(std::endian::native == std::endian::little,
              "model container is little-endian");

constexpr char kMagic[4] = {'D', 'D', 'N', 'N'};

template <typename T>
void Put(std::ostream &os, T value) {
  os.write(reinterpret_cast<const char *>(&value), sizeof(T));
}

template <typename T>
T Get(std::istream &is) {
  T value{};
  is.read(reinterpret_cast<char *>(&value), sizeof(T));
  if (!is) throw DataError("model file truncated");
  return value;
}

void PutLayer(std::ostream &os, const LayerParams &layer) {
  for (int i = 0; i < layer.OutputDim(); ++i)
    for (int j = 0; j < layer.InputDim(); ++j) Put<double>(os, layer.weights(i, j));
  for (int i = 0; i < layer.OutputDim(); ++i) Put<double>(os, layer.bias[i]);
}

LayerParams GetLayer(std::istream &is, int rows, int cols) {
  LayerParams layer(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) layer.weights(i, j) = Get<double>(is);
  for (int i = 0; i < rows; ++i) layer.bias[i] = Get<double>(is);
  return layer;
}

constexpr std::uint32_t kMaxWidth = 1u << 20;

std::uint32_t GetWidth(std::istream &is, const char *what) {
  const auto w = Get<std::uint32_t>(is);
  if (w == 0 || w > kMaxWidth)
    throw DataError(StrCat("model file: implausible ", what, " ", w));
  return w;
}

}  // namespace

void WriteModel(const DdnnModel &model, std::ostream &os) {
  model.Validate();
  os.write(kMagic, 4);
  Put<std::uint32_t>(os, kModelFormatVersion);
  Put<std::uint32_t>(os, model.level_tag);
  Put<std::uint64_t>(os, model.config.seed);
  Put<std::uint32_t>(os, static_cast<std::uint32_t>(model.config.input_dim));
  Put<std::uint32_t>(os, static_cast<std::uint32_t>(model.config.hidden_sizes.size()));
  for (int h : model.config.hidden_sizes) Put<std::uint32_t>(os, static_cast<std::uint32_t>(h));
  Put<std::uint32_t>(os, static_cast<std::uint32_t>(model.encoders.size()));
  Put<std::uint8_t>(os, model.has_classifier ? 1 : 0);
  for (const auto &layer : model.encoders) PutLayer(os, layer);
  if (model.has_classifier) PutLayer(os, model.classifier);
  Put<std::uint32_t>(os, static_cast<std::uint32_t>(model.norm.Dim()));
  for (int d = 0; d < model.norm.Dim(); ++d) Put<double>(os, model.norm.min[d]);
  for (int d = 0; d < model.norm.Dim(); ++d) Put<double>(os, model.norm.max[d]);
  if (!os) throw DataError("failed writing model");
}

DdnnModel ReadModel(std::istream &is) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw DataError("not a DDNN model file (bad magic)");
  const auto version = Get<std::uint32_t>(is);
  if (version != kModelFormatVersion)
    throw DataError(StrCat("unsupported model format version ", version));
  DdnnModel model;
  model.level_tag = Get<std::uint32_t>(is);
  model.config.seed = Get<std::uint64_t>(is);
  model.config.input_dim = static_cast<int>(GetWidth(is, "input_dim"));
  const auto num_hidden = Get<std::uint32_t>(is);
  if (num_hidden > 64) throw DataError("model file: too many hidden layers");
  for (std::uint32_t l = 0; l < num_hidden; ++l)
    model.config.hidden_sizes.push_back(static_cast<int>(GetWidth(is, "hidden width")));
  const auto num_encoders = Get<std::uint32_t>(is);
  if (num_encoders > num_hidden)
    throw DataError("model file: encoder count exceeds hidden sizes");
  const auto head = Get<std::uint8_t>(is);
  if (head > 1) throw DataError("model file: bad classifier flag");
  model.has_classifier = head == 1;
  int width = model.config.input_dim;
  for (std::uint32_t l = 0; l < num_encoders; ++l) {
    model.encoders.push_back(GetLayer(is, model.config.hidden_sizes[l], width));
    width = model.config.hidden_sizes[l];
  }
  if (model.has_classifier) model.classifier = GetLayer(is, 1, width);
  const auto norm_dim = Get<std::uint32_t>(is);
  if (norm_dim != 0 && norm_dim != static_cast<std::uint32_t>(model.config.input_dim))
    throw DataError("model file: normalization dimension mismatch");
  model.norm.min.resize(norm_dim);
  model.norm.max.resize(norm_dim);
  for (std::uint32_t d = 0; d < norm_dim; ++d) model.norm.min[d] = Get<double>(is);
  for (std::uint32_t d = 0; d < norm_dim; ++d) model.norm.max[d] = Get<double>(is);
  model.Validate();
  return model;
}

void WriteModelFile(const DdnnModel &model, const std::string &path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError(StrCat("cannot open ", path, " for writing"));
  WriteModel(model, os);
}

DdnnModel ReadModelFile(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError(StrCat("cannot open model ", path));
  return ReadModel(is);
}

}  // namespace ddnn
