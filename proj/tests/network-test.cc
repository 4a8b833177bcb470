// tests/network-test.cc

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
#include <limits>
#include <sstream>

#include "doctest.h"
#include "ddnn/network.h"
#include "oracles.h"

using namespace ddnn;
using namespace ddnn::testing;

TEST_CASE("logistic values and stability") {
  CHECK(Logistic(0.0) == 0.5);
  CHECK(std::abs(Logistic(40.0) - 1.0) < 1e-15);
  CHECK(std::abs(Logistic(-1.37) - (1.0 - Logistic(1.37))) < 1e-15);
  CHECK(std::isfinite(Logistic(700.0)));
  CHECK(std::isfinite(Logistic(-700.0)));
  CHECK(Logistic(-700.0) >= 0.0);
  CHECK(Logistic(700.0) <= 1.0);
  CHECK(Logistic(-745.0) >= 0.0);
}

TEST_CASE("logistic is monotone") {
  double prev = Logistic(-30.0);
  for (double x = -29.9; x < 30.0; x += 0.1) {
    const double v = Logistic(x);
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("layer forward") {
  SUBCASE("zero affine gives 0.5") {
    LayerParams l(4, 3);
    const Vector out = LayerForward(l, Vector::Constant(3, 0.7));
    for (int i = 0; i < 4; ++i) CHECK(out[i] == 0.5);
  }
  SUBCASE("1x1 identity weight") {
    LayerParams l(1, 1);
    l.weights(0, 0) = 1.0;
    CHECK(LayerForward(l, Vector::Zero(1))[0] == 0.5);
  }
  SUBCASE("random 2x2 against scalar loop") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
      const auto l = RandomLayer(2, 2, &rng, 2.0);
      const Matrix x = RandomUnit(2, 1, &rng);
      const Vector out = LayerForward(l, x.col(0));
      const auto ref = OracleLayer(l, Col(x, 0));
      for (int i = 0; i < 2; ++i) CHECK(std::abs(out[i] - ref[i]) < 1e-12);
    }
  }
  SUBCASE("batch columns match single forward") {
    std::mt19937_64 rng(3);
    const auto l = RandomLayer(5, 4, &rng);
    const Matrix x = RandomUnit(4, 7, &rng);
    const Matrix y = LayerForwardBatch(l, x);
    for (int c = 0; c < 7; ++c) {
      const auto ref = OracleLayer(l, Col(x, c));
      for (int r = 0; r < 5; ++r) CHECK(std::abs(y(r, c) - ref[r]) < 1e-12);
    }
  }
  SUBCASE("width mismatch reports both widths") {
    LayerParams l(2, 3);
    try {
      LayerForward(l, Vector::Zero(4));
      FAIL("expected an error");
    } catch (const DataError &e) {
      const std::string msg = e.what();
      CHECK(msg.find('4') != std::string::npos);
      CHECK(msg.find('3') != std::string::npos);
    }
  }
  SUBCASE("outputs stay strictly inside (0,1)") {
    std::mt19937_64 rng(5);
    const auto l = RandomLayer(6, 6, &rng, 3.0);
    const Vector out = LayerForward(l, Vector::Constant(6, 1.0));
    for (int i = 0; i < 6; ++i) {
      CHECK(out[i] > 0.0);
      CHECK(out[i] < 1.0);
    }
  }
}

TEST_CASE("reconstruction loss") {
  Vector half = Vector::Constant(2, 0.5);
  CHECK(std::abs(ReconstructionLoss(half, half) - 2.0 * std::log(2.0)) < 1e-12);
  CHECK(std::abs(ReconstructionLoss(half, half) - 1.38629) < 1e-5);

  Vector t(2), z(2);
  t << 1.0, 0.0;
  z << 1.0 - 1e-7, 1e-7;
  CHECK(std::abs(ReconstructionLoss(t, z) - 2e-7) < 1e-12);
  z << 1.0, 0.0;  // clamped to the same minimum
  CHECK(std::abs(ReconstructionLoss(t, z) - 2e-7) < 1e-12);

  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix x = RandomUnit(5, 2, &rng);
    CHECK(std::abs(ReconstructionLoss(x.col(0), x.col(1)) -
                   OracleReconLoss(Col(x, 0), Col(x, 1))) < 1e-12);
    CHECK(ReconstructionLoss(x.col(0), x.col(1)) >= 0.0);
  }
  CHECK_THROWS_AS(ReconstructionLoss(Vector::Zero(2), Vector::Zero(3)), DataError);
}

TEST_CASE("reconstruction loss is minimized at the clamped target") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix x = RandomUnit(6, 1, &rng);
    const double at_target = ReconstructionLoss(x.col(0), x.col(0));
    Vector other = x.col(0);
    other[trial % 6] = u(rng);
    CHECK(at_target <= ReconstructionLoss(x.col(0), other) + 1e-15);
  }
}

TEST_CASE("classification loss") {
  CHECK(std::abs(ClassificationLoss(1, 0.5) - std::log(2.0)) < 1e-15);
  CHECK(std::abs(ClassificationLoss(0, 0.5) - std::log(2.0)) < 1e-15);
  CHECK(std::abs(ClassificationLoss(1, 0.9) - 0.10536) < 1e-5);
  CHECK(std::abs(ClassificationLoss(1, 0.9) + std::log(0.9)) < 1e-15);
  CHECK(std::isfinite(ClassificationLoss(1, 0.0)));
  CHECK(std::isfinite(ClassificationLoss(0, 1.0)));
  CHECK(ClassificationLoss(0, 0.3) >= 0.0);
}

TEST_CASE("autoencoder gradient") {
  SUBCASE("zero residual gives zero gradient") {
    std::mt19937_64 rng(4);
    const auto enc = RandomLayer(2, 3, &rng);
    const auto dec = RandomLayer(3, 2, &rng);
    const Matrix x = RandomUnit(3, 1, &rng);
    const Vector z = LayerForward(dec, LayerForward(enc, x.col(0)));
    const auto g = AutoencoderGrad(enc, dec, x.col(0), z);
    CHECK(g.encoder.weights.cwiseAbs().maxCoeff() < 1e-12);
    CHECK(g.encoder.bias.cwiseAbs().maxCoeff() < 1e-12);
    CHECK(g.decoder.weights.cwiseAbs().maxCoeff() < 1e-12);
    CHECK(g.decoder.bias.cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("random 3-2-3 against central differences") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 10; ++trial) {
      auto enc = RandomLayer(2, 3, &rng);
      auto dec = RandomLayer(3, 2, &rng);
      const Matrix x = RandomUnit(3, 1, &rng);
      const Matrix t = RandomUnit(3, 1, &rng);
      const auto g = AutoencoderGrad(enc, dec, x.col(0), t.col(0));
      auto f = [&] { return OracleAutoencoderLoss(enc, dec, x, t); };
      CHECK(FdCheckLayer(&enc, g.encoder, f) < 1e-5);
      CHECK(FdCheckLayer(&dec, g.decoder, f) < 1e-5);
      CHECK(std::abs(g.loss - f()) < 1e-12);
    }
  }
  SUBCASE("single unit sign check") {
    LayerParams enc(1, 1), dec(1, 1);
    enc.weights(0, 0) = 0.5;
    dec.weights(0, 0) = 0.5;
    Vector one = Vector::Ones(1);
    const auto g = AutoencoderGrad(enc, dec, one, one);
    const double z = LayerForward(dec, LayerForward(enc, one))[0];
    CHECK(z - 1.0 < 0.0);
    CHECK(g.decoder.bias[0] < 0.0);
  }
  SUBCASE("batch gradient is the mean of per-example gradients") {
    std::mt19937_64 rng(2);
    const auto enc = RandomLayer(3, 4, &rng);
    const auto dec = RandomLayer(4, 3, &rng);
    const Matrix x = RandomUnit(4, 2, &rng);
    const Matrix t = RandomUnit(4, 2, &rng);
    const auto gb = AutoencoderBatchGrad(enc, dec, x, t);
    const auto g0 = AutoencoderGrad(enc, dec, x.col(0), t.col(0));
    const auto g1 = AutoencoderGrad(enc, dec, x.col(1), t.col(1));
    CHECK((gb.encoder.weights - 0.5 * (g0.encoder.weights + g1.encoder.weights))
              .cwiseAbs().maxCoeff() < 1e-12);
    CHECK((gb.decoder.bias - 0.5 * (g0.decoder.bias + g1.decoder.bias)).cwiseAbs().maxCoeff() <
          1e-12);
  }
  SUBCASE("dimension mismatch") {
    LayerParams enc(2, 3), dec(3, 2);
    CHECK_THROWS_AS(AutoencoderGrad(enc, dec, Vector::Zero(4), Vector::Zero(3)), DataError);
    CHECK_THROWS_AS(AutoencoderGrad(enc, dec, Vector::Zero(3), Vector::Zero(2)), DataError);
  }
}

TEST_CASE("classifier gradient") {
  SUBCASE("random depth-2 model against central differences") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 10; ++trial) {
      DdnnModel m = RandomModel(4, {3, 2}, &rng);
      const Matrix x = RandomUnit(4, 3, &rng);
      const std::vector<int> y = {1, 0, 1};
      const auto g = ClassifierGrad(m, x, y);
      auto f = [&] { return OracleClassifierLoss(m, x, y); };
      for (std::size_t l = 0; l < m.encoders.size(); ++l)
        CHECK(FdCheckLayer(&m.encoders[l], g.encoders[l], f) < 1e-5);
      CHECK(FdCheckLayer(&m.classifier, g.classifier, f) < 1e-5);
      CHECK(std::abs(g.loss - f()) < 1e-12);
    }
  }
  SUBCASE("saturated correct score gives a vanishing gradient") {
    DdnnModel m;
    m.config.input_dim = 3;
    m.config.hidden_sizes = {2};
    m.encoders.push_back(LayerParams(2, 3));
    m.classifier = LayerParams(1, 2);
    m.classifier.bias[0] = 30.0;
    m.has_classifier = true;
    const Matrix x = Matrix::Constant(3, 4, 0.3);
    const std::vector<int> y(4, 1);
    const auto g = ClassifierGrad(m, x, y);
    double norm2 = g.classifier.weights.squaredNorm() + g.classifier.bias.squaredNorm();
    for (const auto &e : g.encoders) norm2 += e.weights.squaredNorm() + e.bias.squaredNorm();
    CHECK(std::sqrt(norm2) < 1e-6);
  }
  SUBCASE("batch of two is the mean of singles") {
    std::mt19937_64 rng(9);
    const DdnnModel m = RandomModel(5, {4, 3}, &rng);
    const Matrix x = RandomUnit(5, 2, &rng);
    const std::vector<int> y = {0, 1};
    const auto gb = ClassifierGrad(m, x, y);
    const auto g0 = ClassifierGrad(m, x.col(0), std::vector<int>{0});
    const auto g1 = ClassifierGrad(m, x.col(1), std::vector<int>{1});
    for (std::size_t l = 0; l < m.encoders.size(); ++l)
      CHECK((gb.encoders[l].weights - 0.5 * (g0.encoders[l].weights + g1.encoders[l].weights))
                .cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs(gb.classifier.bias[0] - 0.5 * (g0.classifier.bias[0] + g1.classifier.bias[0])) <
          1e-12);
  }
  SUBCASE("contract violations") {
    std::mt19937_64 rng(1);
    const DdnnModel m = RandomModel(4, {3}, &rng);
    CHECK_THROWS_AS(ClassifierGrad(m, Matrix::Zero(4, 0), std::vector<int>{}), DataError);
    CHECK_THROWS_AS(ClassifierGrad(m, Matrix::Zero(5, 1), std::vector<int>{1}), DataError);
    CHECK_THROWS_AS(ClassifierGrad(m, Matrix::Zero(4, 2), std::vector<int>{1}), DataError);
  }
}

TEST_CASE("model forward matches composed oracle") {
  std::mt19937_64 rng(77);
  const DdnnModel m = RandomModel(6, {5, 4, 3}, &rng);
  const Matrix x = RandomUnit(6, 8, &rng);
  ActivationRecord rec;
  const Vector s = ModelForward(m, x, &rec);
  for (int c = 0; c < 8; ++c) CHECK(std::abs(s[c] - OracleModelScore(m, Col(x, c))) < 1e-12);
  for (const auto &a : rec.activations) {
    CHECK(a.minCoeff() > 0.0);
    CHECK(a.maxCoeff() < 1.0);
  }
  CHECK(ModelForward(m, x) == s);
}

TEST_CASE("sgd step") {
  LayerParams p(1, 1), g(1, 1);
  p.weights(0, 0) = 1.0;
  g.weights(0, 0) = 2.0;
  SgdStep(&p, g, 0.004);
  CHECK(p.weights(0, 0) == 0.992);

  std::mt19937_64 rng(6);
  const auto start = RandomLayer(3, 4, &rng);
  const auto grad = RandomLayer(3, 4, &rng);
  auto zero = start;
  SgdStep(&zero, grad, 0.0);
  CHECK(zero == start);

  auto one = start, two = start;
  SgdStep(&one, grad, 0.5);
  SgdStep(&two, grad, 0.25);
  SgdStep(&two, grad, 0.25);
  CHECK(one == two);

  LayerParams bad(2, 4);
  CHECK_THROWS_AS(SgdStep(&bad, grad, 0.1), DataError);
}

TEST_CASE("a tiny step does not increase the batch loss") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const auto enc0 = RandomLayer(3, 5, &rng);
    const auto dec0 = RandomLayer(5, 3, &rng);
    const Matrix x = RandomUnit(5, 6, &rng);
    const Matrix t = RandomUnit(5, 6, &rng);
    auto enc = enc0, dec = dec0;
    const auto g = AutoencoderBatchGrad(enc, dec, x, t);
    SgdStep(&enc, g.encoder, 1e-6);
    SgdStep(&dec, g.decoder, 1e-6);
    CHECK(AutoencoderBatchGrad(enc, dec, x, t).loss <= g.loss);

    DdnnModel m = RandomModel(5, {3, 2}, &rng);
    const std::vector<int> y = {0, 1, 1, 0, 1, 0};
    const auto gm = ClassifierGrad(m, x, y);
    SgdStep(&m, gm, 1e-6);
    CHECK(ClassifierGrad(m, x, y).loss <= gm.loss);
  }
}

TEST_CASE("glorot initialization") {
  Rng a(5), b(5);
  const auto l1 = InitLayer(54, 273, &a);
  const auto l2 = InitLayer(54, 273, &b);
  CHECK(l1 == l2);
  const double r = std::sqrt(6.0 / (54 + 273));
  CHECK(l1.weights.cwiseAbs().maxCoeff() <= r);
  CHECK(l1.weights.cwiseAbs().maxCoeff() > 0.9 * r);
  CHECK(l1.bias.isZero());
  CHECK(std::abs(l1.weights.mean()) < 0.01);
}

TEST_CASE("batch reduction helpers") {
  CHECK(EffectiveStep(0.004, BatchReduction::kMean, 512) == 0.004);
  CHECK(EffectiveStep(0.004, BatchReduction::kSum, 512) == 0.004 * 512);
  CHECK(ParseBatchReduction("sum") == BatchReduction::kSum);
  CHECK(BatchReductionName(ParseBatchReduction("mean")) == "mean");
  CHECK_THROWS_AS(ParseBatchReduction("max"), ConfigError);
}

TEST_CASE("model serialization") {
  std::mt19937_64 rng(99);
  DdnnModel m = RandomModel(273, {54, 7, 7}, &rng);
  m.config.seed = 1234567890123ULL;
  m.level_tag = 3;
  m.norm.min = Vector::LinSpaced(273, -3.0, 1.0);
  m.norm.max = Vector::LinSpaced(273, 2.0, 9.0);
  m.encoders[0].weights(3, 5) = std::numeric_limits<double>::denorm_min();
  m.encoders[1].bias[2] = -0.1;

  std::stringstream ss;
  WriteModel(m, ss);
  const std::string bytes = ss.str();
  CHECK(bytes.substr(0, 4) == "DDNN");
  const DdnnModel back = ReadModel(ss);
  CHECK(back == m);
  CHECK(back.encoders[0].weights(3, 5) == std::numeric_limits<double>::denorm_min());
  CHECK(back.LayerWidths() == std::vector<int>{273, 54, 7, 7, 1});

  std::stringstream again;
  WriteModel(back, again);
  CHECK(again.str() == bytes);

  SUBCASE("encoder-only checkpoint") {
    DdnnModel e = m;
    e.has_classifier = false;
    e.classifier = LayerParams();
    e.encoders.pop_back();
    e.level_tag = 2;
    std::stringstream s2;
    WriteModel(e, s2);
    CHECK(ReadModel(s2) == e);
  }
  SUBCASE("corrupt inputs are rejected") {
    std::stringstream bad_magic(std::string("XDNN") + bytes.substr(4));
    CHECK_THROWS_AS(ReadModel(bad_magic), DataError);
    std::stringstream truncated(bytes.substr(0, bytes.size() / 2));
    CHECK_THROWS_AS(ReadModel(truncated), DataError);
    std::string wrong_version = bytes;
    wrong_version[4] = 99;
    std::stringstream wv(wrong_version);
    CHECK_THROWS_AS(ReadModel(wv), DataError);
    CHECK_THROWS_AS(ReadModelFile("/nonexistent/model.bin"), DataError);
  }
}

TEST_CASE("model validation") {
  std::mt19937_64 rng(1);
  DdnnModel m = RandomModel(4, {3, 2}, &rng);
  CHECK_NOTHROW(m.Validate());
  m.encoders[1] = LayerParams(2, 4);
  CHECK_THROWS_AS(m.Validate(), DataError);
}
