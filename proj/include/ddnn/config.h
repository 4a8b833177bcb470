// include/ddnn/config.h

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

#ifndef DDNN_CONFIG_H_
#define DDNN_CONFIG_H_

#include <string>

#include "ddnn/dataset.h"
#include "ddnn/eval.h"
#include "ddnn/features.h"
#include "ddnn/finetune.h"
#include "ddnn/pretrain.h"

namespace ddnn {

// Everything a command needs, read from one JSON file. Sections: "synth",
// "features", "pretrain", "finetune", "sweep". Missing keys keep their
// defaults; unknown keys are rejected.
struct ExperimentConfig {
  SynthOptions synth;
  FeatureConfig features;
  PretrainConfig pretrain;
  FinetuneConfig finetune;
  std::vector<int> depths = {1, 2, 3};
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<Method> methods = {Method::kDdnn};
  bool exclude_babble_low_snr = true;

  void Validate() const;
  SweepOptions Sweep() const;
};

ExperimentConfig ParseConfig(const std::string &json_text);
ExperimentConfig LoadConfig(const std::string &path);
// Canonical JSON with every field spelled out.
std::string ConfigToJson(const ExperimentConfig &config);

}  // namespace ddnn

#endif  // DDNN_CONFIG_H_
