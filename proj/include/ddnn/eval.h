// include/ddnn/eval.h

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

#ifndef DDNN_EVAL_H_
#define DDNN_EVAL_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ddnn/dataset.h"
#include "ddnn/finetune.h"
#include "ddnn/pretrain.h"

namespace ddnn {

// 100 * matches / N. Throws DataError on empty or unequal inputs.
double Accuracy(std::span<const int> decisions, std::span<const int> labels);

enum class Method { kDdnn, kDbn, kRandomInit };
std::string MethodName(Method method);
Method ParseMethod(const std::string &name);

struct CellKey {
  std::string noise;
  double snr_db = 0.0;
  std::string method;
  int depth = 0;

  auto operator<=>(const CellKey &) const = default;
};

struct CellResult {
  CellKey key;
  std::vector<std::uint64_t> seeds;
  std::vector<double> accuracies;  // one per seed, same order
  std::int64_t frames = 0;         // test frames per run
  bool excluded = false;           // left out of the averages
  std::string error;               // non-empty when training failed

  bool Ok() const { return error.empty() && !accuracies.empty(); }
  double Mean() const;
};

struct EvalReport {
  std::vector<CellResult> cells;  // sorted by key

  void Sort();
  const CellResult *Find(const CellKey &key) const;
  std::vector<std::string> Noises() const;
  std::vector<double> Snrs() const;
  // (method, depth) rows in first-seen order after sorting.
  std::vector<std::pair<std::string, int>> Rows() const;

  // Mean over noises of the non-excluded cells at one SNR.
  std::optional<double> SnrAverage(const std::string &method, int depth, double snr_db) const;
  // Mean over every non-excluded (noise, snr) cell.
  std::optional<double> OverallAverage(const std::string &method, int depth) const;
};

// Default exclusion: babble at -5 and 0 dB.
bool DefaultExclusion(const std::string &noise, double snr_db);

using ExclusionRule = std::function<bool(const std::string &, double)>;

struct SweepOptions {
  std::vector<int> depths = {1, 2, 3};
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<Method> methods = {Method::kDdnn};
  PretrainConfig pretrain;
  FinetuneConfig finetune;
  ExclusionRule exclude = DefaultExclusion;
  // Progress callback: (key, seed, accuracy).
  std::function<void(const CellKey &, std::uint64_t, double)> on_run;
};

// One trained model for a single (method, depth, seed) on a corpus cell.
struct TrainedRun {
  DdnnModel model;
  PretrainState pretrain;
  FinetuneLog log;
  double test_accuracy = 0.0;
  double dev_accuracy = 0.0;
};

// Normalizes with training-split stats, pretrains (per method), assembles,
// fine-tunes and scores the test split.
TrainedRun TrainAndEvaluate(const CorpusCell &cell, Method method, int depth,
                            std::uint64_t seed, const PretrainConfig &pretrain,
                            const FinetuneConfig &finetune);

// One model per (cell, method, depth, seed). Failures are recorded in the
// affected cell and the sweep continues.
EvalReport DepthSweep(const std::vector<CorpusCell> &cells, const SweepOptions &options);

// Aligned plain-text tables: one per noise (SNR columns, method/depth rows)
// plus an average table. Accuracies shown with two decimals, empty cells as
// an em dash.
std::string RenderTables(const EvalReport &report);
std::string RenderCsv(const EvalReport &report);
EvalReport ParseCsv(const std::string &csv);

}  // namespace ddnn

#endif  // DDNN_EVAL_H_
