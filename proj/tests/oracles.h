// tests/oracles.h

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

// Independent reference implementations used by the tests. Everything here is
// written with scalar loops and shares no code with the library beyond the
// parameter containers.

#ifndef DDNN_TESTS_ORACLES_H_
#define DDNN_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "ddnn/network.h"

namespace ddnn::testing {

inline double OracleSigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline double OracleClamp(double p) { return std::min(std::max(p, 1e-7), 1.0 - 1e-7); }

inline std::vector<double> OracleLayer(const LayerParams &layer, const std::vector<double> &in) {
  std::vector<double> out(layer.OutputDim());
  for (int j = 0; j < layer.OutputDim(); ++j) {
    double a = layer.bias[j];
    for (int k = 0; k < layer.InputDim(); ++k) a += layer.weights(j, k) * in[k];
    out[j] = OracleSigmoid(a);
  }
  return out;
}

inline double OracleReconLoss(const std::vector<double> &x, const std::vector<double> &z) {
  double s = 0.0;
  for (std::size_t d = 0; d < x.size(); ++d) {
    const double zc = OracleClamp(z[d]);
    s -= x[d] * std::log(zc) + (1.0 - x[d]) * std::log(1.0 - zc);
  }
  return s;
}

inline double OracleBce(int y, double p) {
  const double pc = OracleClamp(p);
  return y == 1 ? -std::log(pc) : -std::log(1.0 - pc);
}

inline std::vector<double> Col(const Matrix &m, Eigen::Index c) {
  std::vector<double> v(m.rows());
  for (Eigen::Index r = 0; r < m.rows(); ++r) v[r] = m(r, c);
  return v;
}

inline double OracleModelScore(const DdnnModel &m, std::vector<double> x) {
  for (const auto &l : m.encoders) x = OracleLayer(l, x);
  return OracleLayer(m.classifier, x)[0];
}

inline LayerParams RandomLayer(int out, int in, std::mt19937_64 *rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  LayerParams l(out, in);
  for (int j = 0; j < out; ++j) {
    for (int k = 0; k < in; ++k) l.weights(j, k) = u(*rng);
    l.bias[j] = u(*rng);
  }
  return l;
}

inline Matrix RandomUnit(int rows, int cols, std::mt19937_64 *rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix m(rows, cols);
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) m(r, c) = u(*rng);
  return m;
}

inline DdnnModel RandomModel(int input, const std::vector<int> &hidden, std::mt19937_64 *rng,
                             double scale = 1.0) {
  DdnnModel m;
  m.config.input_dim = input;
  m.config.hidden_sizes = hidden;
  int w = input;
  for (int h : hidden) {
    m.encoders.push_back(RandomLayer(h, w, rng, scale));
    w = h;
  }
  m.classifier = RandomLayer(1, w, rng, scale);
  m.has_classifier = true;
  return m;
}

// |a - n| / max(|a|, |n|, floor); the floor keeps vanishing partials from
// turning round-off into large ratios.
inline double RelError(double analytic, double numeric, double floor = 1e-5) {
  return std::abs(analytic - numeric) /
         std::max({std::abs(analytic), std::abs(numeric), floor});
}

// Central differences over every entry of `param`, objective re-evaluated by
// `f`. Returns the worst relative error against `grad`.
inline double FdCheckLayer(LayerParams *param, const LayerParams &grad,
                           const std::function<double()> &f, double h = 1e-5) {
  double worst = 0.0;
  auto probe = [&](double *p, double analytic) {
    const double saved = *p;
    *p = saved + h;
    const double up = f();
    *p = saved - h;
    const double down = f();
    *p = saved;
    worst = std::max(worst, RelError(analytic, (up - down) / (2.0 * h)));
  };
  for (int j = 0; j < param->OutputDim(); ++j) {
    for (int k = 0; k < param->InputDim(); ++k) probe(&param->weights(j, k), grad.weights(j, k));
    probe(&param->bias[j], grad.bias[j]);
  }
  return worst;
}

// Mean reconstruction loss over the batch, scalar loops only.
inline double OracleAutoencoderLoss(const LayerParams &enc, const LayerParams &dec,
                                    const Matrix &inputs, const Matrix &targets) {
  double s = 0.0;
  for (Eigen::Index c = 0; c < inputs.cols(); ++c)
    s += OracleReconLoss(Col(targets, c), OracleLayer(dec, OracleLayer(enc, Col(inputs, c))));
  return s / static_cast<double>(inputs.cols());
}

inline double OracleClassifierLoss(const DdnnModel &m, const Matrix &inputs,
                                   std::span<const int> labels) {
  double s = 0.0;
  for (Eigen::Index c = 0; c < inputs.cols(); ++c)
    s += OracleBce(labels[c], OracleModelScore(m, Col(inputs, c)));
  return s / static_cast<double>(inputs.cols());
}

}  // namespace ddnn::testing

#endif  // DDNN_TESTS_ORACLES_H_
