// tests/finetune-test.cc

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

#include <cmath>
#include <random>

#include "doctest.h"
#include "ddnn/eval.h"
#include "ddnn/finetune.h"
#include "ddnn/pretrain.h"
#include "oracles.h"

using namespace ddnn;
using namespace ddnn::testing;

namespace {

PretrainState TrainedState(int input, std::vector<int> sizes, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Matrix clean = RandomUnit(input, 24, &rng);
  PretrainConfig c;
  c.layer_sizes = std::move(sizes);
  c.max_epochs = 1;
  c.batch_size = 8;
  c.seed = seed;
  return RunPretraining(clean, clean, c);
}

// Two classes separated by the line x0 + x1 = 1 with a margin.
LabeledBatch SeparableToy(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  LabeledBatch b;
  b.inputs.resize(2, n);
  b.labels.resize(n);
  int i = 0;
  while (i < n) {
    const double x = u(rng), y = u(rng);
    if (std::abs(x + y - 1.0) < 0.1) continue;
    b.inputs(0, i) = x;
    b.inputs(1, i) = y;
    b.labels[i] = x + y > 1.0 ? 1 : 0;
    ++i;
  }
  return b;
}

FinetuneConfig ToyConfig(int epochs) {
  FinetuneConfig c;
  c.max_epochs = epochs;
  c.learning_rate = 0.5;
  c.batch_size = 16;
  c.seed = 3;
  return c;
}

}  // namespace

TEST_CASE("assembled shapes") {
  const auto s3 = TrainedState(273, {54, 7, 7}, 1);
  const auto m3 = AssembleClassifier(s3, 5);
  CHECK(m3.LayerWidths() == std::vector<int>{273, 54, 7, 7, 1});
  CHECK(m3.has_classifier);
  CHECK(m3.level_tag == 3);
  const auto s1 = TrainedState(273, {54}, 1);
  CHECK(AssembleClassifier(s1, 5).LayerWidths() == std::vector<int>{273, 54, 1});
  CHECK(RandomInitClassifier(273, {54, 7}, 5).LayerWidths() ==
        std::vector<int>{273, 54, 7, 1});
}

TEST_CASE("assembly copies the noisy path and adds a head") {
  const auto s = TrainedState(12, {6, 4, 3}, 2);
  const auto m = AssembleClassifier(s, 8);
  REQUIRE(m.encoders.size() == 3);
  for (int l = 0; l < 3; ++l) CHECK(m.encoders[l] == s.noisy_path[l]);
  std::mt19937_64 rng(3);
  const Matrix x = RandomUnit(12, 5, &rng);
  const Matrix h = PropagateNoisy(s, x, 3);
  const Vector scores = ModelForward(m, x);
  for (int c = 0; c < 5; ++c) {
    const double oracle = OracleLayer(m.classifier, Col(h, c))[0];
    CHECK(std::abs(scores[c] - oracle) <= 1e-15);
  }
  // The head depends only on the seed.
  PretrainConfig pc;
  pc.layer_sizes = {6, 4, 3};
  const auto attached = AttachHead(CheckpointModel(s, pc), 8);
  CHECK(attached.classifier == m.classifier);
  CHECK(AssembleClassifier(s, 9).classifier.weights != m.classifier.weights);
  CHECK_THROWS_AS(AttachHead(m, 8), ConfigError);
  CHECK_THROWS_AS(AttachHead(DdnnModel{}, 8), ConfigError);
}

TEST_CASE("incomplete pretraining cannot be assembled") {
  PretrainConfig c;
  c.layer_sizes = {4, 3};
  PretrainState s = InitPretrainState(6, c);
  CHECK_THROWS_AS(AssembleClassifier(s, 1), ConfigError);
  std::mt19937_64 rng(1);
  const Matrix x = RandomUnit(6, 8, &rng);
  c.max_epochs = 1;
  PretrainLevel(x, x, &s, c);
  CHECK_THROWS_AS(AssembleClassifier(s, 1), ConfigError);
  CHECK_THROWS_AS(RandomInitClassifier(6, {}, 1), ConfigError);
}

TEST_CASE("separable toy problem") {
  const auto train = SeparableToy(400, 11);
  const auto test = SeparableToy(200, 12);
  auto model = RandomInitClassifier(2, {4}, 7);
  FinetuneLog log;
  const auto trained = Finetune(model, train, ToyConfig(130), &test, &log);
  const double train_acc = Accuracy(Decisions(PredictBatch(trained, train.inputs)), train.labels);
  MESSAGE("toy train accuracy " << train_acc);
  CHECK(train_acc >= 99.0);
  REQUIRE(log.epochs.size() == 130);
  CHECK(log.epochs.back().train_loss < log.epochs.front().train_loss);
  CHECK(log.epochs.back().dev_accuracy >= 95.0);
  const std::string csv = log.ToCsv();
  CHECK(csv.rfind("epoch,train_loss,dev_accuracy\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 131);
}

TEST_CASE("fine-tuning updates every layer") {
  const auto train = SeparableToy(64, 13);
  const auto model = RandomInitClassifier(2, {4, 3}, 7);
  const auto trained = Finetune(model, train, ToyConfig(2));
  for (std::size_t l = 0; l < model.encoders.size(); ++l)
    CHECK(trained.encoders[l].weights != model.encoders[l].weights);
  CHECK(trained.classifier.weights != model.classifier.weights);
}

TEST_CASE("zero epochs and determinism") {
  const auto train = SeparableToy(100, 14);
  const auto model = RandomInitClassifier(2, {3}, 2);
  const auto same = Finetune(model, train, ToyConfig(0));
  CHECK(same.encoders == model.encoders);
  CHECK(same.classifier == model.classifier);
  const auto a = Finetune(model, train, ToyConfig(5));
  const auto b = Finetune(model, train, ToyConfig(5));
  CHECK(a.encoders == b.encoders);
  CHECK(a.classifier == b.classifier);
  auto other = ToyConfig(5);
  other.seed = 4;
  CHECK(!(Finetune(model, train, other).classifier == a.classifier));
}

TEST_CASE("fine-tuning never touches the pretraining state") {
  const auto s = TrainedState(8, {4, 3}, 6);
  const PretrainState copy = s;
  std::mt19937_64 rng(9);
  LabeledBatch b{RandomUnit(8, 30, &rng), std::vector<int>(30, 1)};
  Finetune(AssembleClassifier(s, 1), b, ToyConfig(3));
  CHECK(s == copy);
}

TEST_CASE("early stopping returns the best dev model") {
  const auto train = SeparableToy(200, 15);
  const auto dev = SeparableToy(100, 16);
  auto c = ToyConfig(60);
  c.patience = 3;
  FinetuneLog log;
  const auto best = Finetune(RandomInitClassifier(2, {4}, 1), train, c, &dev, &log);
  double best_acc = -1;
  for (const auto &e : log.epochs) best_acc = std::max(best_acc, e.dev_accuracy);
  CHECK(Accuracy(Decisions(PredictBatch(best, dev.inputs)), dev.labels) == best_acc);
}

TEST_CASE("decisions") {
  DdnnModel zero;
  zero.config.input_dim = 3;
  zero.config.hidden_sizes = {2};
  zero.encoders.push_back(LayerParams(2, 3));
  zero.classifier = LayerParams(1, 2);
  zero.has_classifier = true;
  const auto p = PredictFrame(zero, Vector::Constant(3, 0.7));
  CHECK(p.score == 0.5);
  CHECK(p.decision == 1);

  // Head bias sets the score: logit(0.9) and logit(0.1).
  auto hi = zero;
  hi.classifier.bias[0] = std::log(0.9 / 0.1);
  CHECK(PredictFrame(hi, Vector::Zero(3)).decision == 1);
  auto lo = zero;
  lo.classifier.bias[0] = std::log(0.1 / 0.9);
  const auto pl = PredictFrame(lo, Vector::Zero(3));
  CHECK(pl.score == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(pl.decision == 0);
  CHECK_THROWS_AS(PredictFrame(zero, Vector::Zero(4)), DataError);

  std::mt19937_64 rng(5);
  const auto m = RandomModel(6, {5, 3}, &rng, 2.0);
  const Matrix x = RandomUnit(6, 40, &rng);
  const auto batch = PredictBatch(m, x);
  for (int c = 0; c < 40; ++c) {
    const auto single = PredictFrame(m, x.col(c));
    CHECK(batch[c].score == single.score);
    CHECK(batch[c].decision == single.decision);
    CHECK(batch[c].decision == (single.score >= 0.5 ? 1 : 0));
  }
}

TEST_CASE("contract errors") {
  const auto model = RandomInitClassifier(2, {3}, 2);
  CHECK_THROWS_AS(Finetune(model, LabeledBatch{Matrix(2, 0), {}}, ToyConfig(1)), DataError);
  LabeledBatch wrong{Matrix::Zero(3, 4), {0, 1, 0, 1}};
  CHECK_THROWS_AS(Finetune(model, wrong, ToyConfig(1)), DataError);
  LabeledBatch short_labels{Matrix::Zero(2, 4), {0, 1}};
  CHECK_THROWS_AS(Finetune(model, short_labels, ToyConfig(1)), DataError);
  LabeledBatch nan{Matrix::Constant(2, 4, std::nan("")), {0, 1, 0, 1}};
  CHECK_THROWS_AS(Finetune(model, nan, ToyConfig(1)), NumericalError);
  auto headless = model;
  headless.has_classifier = false;
  CHECK_THROWS_AS(Finetune(headless, SeparableToy(4, 1), ToyConfig(1)), ConfigError);
  for (auto mutate : std::vector<std::function<void(FinetuneConfig *)>>{
           [](FinetuneConfig *c) { c->learning_rate = -0.1; },
           [](FinetuneConfig *c) { c->learning_rate = NAN; },
           [](FinetuneConfig *c) { c->max_epochs = -2; },
           [](FinetuneConfig *c) { c->batch_size = 0; },
           [](FinetuneConfig *c) { c->patience = -1; }}) {
    FinetuneConfig c;
    mutate(&c);
    CHECK_THROWS_AS(c.Validate(), ConfigError);
  }
}
