// src/config.cc

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

#include "ddnn/config.h"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace ddnn {

namespace {

using Json = nlohmann::json;

void CheckKeys(const Json &obj, const std::string &section,
               const std::set<std::string> &allowed) {
  if (!obj.is_object()) throw ConfigError(StrCat("config: '", section, "' must be an object"));
  for (const auto &[key, value] : obj.items())
    if (!allowed.count(key))
      throw ConfigError(StrCat("config: unknown key '", section, ".", key, "'"));
}

template <typename T>
void Get(const Json &obj, const char *key, const std::string &section, T *out) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    *out = it->get<T>();
  } catch (const Json::exception &) {
    throw ConfigError(StrCat("config: bad value for '", section, ".", key, "'"));
  }
}

void ParseSynth(const Json &j, SynthOptions *s) {
  CheckKeys(j, "synth", {"num_utterances", "utterance_seconds", "speech_fraction", "seed",
                         "split_ratios", "noises", "snrs_db", "sample_rate"});
  Get(j, "num_utterances", "synth", &s->num_utterances);
  Get(j, "utterance_seconds", "synth", &s->utterance_seconds);
  Get(j, "speech_fraction", "synth", &s->speech_fraction);
  Get(j, "seed", "synth", &s->seed);
  Get(j, "noises", "synth", &s->noises);
  Get(j, "snrs_db", "synth", &s->snrs_db);
  Get(j, "sample_rate", "synth", &s->sample_rate);
  if (j.contains("split_ratios")) {
    std::vector<double> r;
    Get(j, "split_ratios", "synth", &r);
    if (r.size() != 3) throw ConfigError("config: synth.split_ratios needs [train, dev, test]");
    s->ratios = {r[0], r[1], r[2]};
  }
}

void ParseFeatures(const Json &j, FeatureConfig *f) {
  CheckKeys(j, "features",
            {"fft_size", "dft_bands", "mel_filters", "mfcc_coeffs", "lpc_order", "plp_order",
             "plp_bands", "rasta_pole", "ams_subbands", "ams_mod_bins", "ams_window", "ams_hop",
             "short_window", "long_window", "pitch_min_hz", "pitch_max_hz",
             "voicing_threshold"});
  Get(j, "fft_size", "features", &f->fft_size);
  Get(j, "dft_bands", "features", &f->dft_bands);
  Get(j, "mel_filters", "features", &f->mel_filters);
  Get(j, "mfcc_coeffs", "features", &f->mfcc_coeffs);
  Get(j, "lpc_order", "features", &f->lpc_order);
  Get(j, "plp_order", "features", &f->plp_order);
  Get(j, "plp_bands", "features", &f->plp_bands);
  Get(j, "rasta_pole", "features", &f->rasta_pole);
  Get(j, "ams_subbands", "features", &f->ams_subbands);
  Get(j, "ams_mod_bins", "features", &f->ams_mod_bins);
  Get(j, "ams_window", "features", &f->ams_window);
  Get(j, "ams_hop", "features", &f->ams_hop);
  Get(j, "short_window", "features", &f->short_window);
  Get(j, "long_window", "features", &f->long_window);
  Get(j, "pitch_min_hz", "features", &f->pitch_min_hz);
  Get(j, "pitch_max_hz", "features", &f->pitch_max_hz);
  Get(j, "voicing_threshold", "features", &f->voicing_threshold);
}

void ParsePretrain(const Json &j, PretrainConfig *p) {
  CheckKeys(j, "pretrain", {"layer_sizes", "learning_rate", "max_epochs", "batch_size", "seed",
                            "batch_reduction", "clean_pretrainer"});
  Get(j, "layer_sizes", "pretrain", &p->layer_sizes);
  Get(j, "learning_rate", "pretrain", &p->learning_rate);
  Get(j, "max_epochs", "pretrain", &p->max_epochs);
  Get(j, "batch_size", "pretrain", &p->batch_size);
  Get(j, "seed", "pretrain", &p->seed);
  std::string name;
  if (j.contains("batch_reduction")) {
    Get(j, "batch_reduction", "pretrain", &name);
    p->reduction = ParseBatchReduction(name);
  }
  if (j.contains("clean_pretrainer")) {
    Get(j, "clean_pretrainer", "pretrain", &name);
    p->clean_pretrainer = ParseCleanPretrainer(name);
  }
}

void ParseFinetune(const Json &j, FinetuneConfig *f) {
  CheckKeys(j, "finetune", {"learning_rate", "max_epochs", "batch_size", "seed",
                            "batch_reduction", "patience"});
  Get(j, "learning_rate", "finetune", &f->learning_rate);
  Get(j, "max_epochs", "finetune", &f->max_epochs);
  Get(j, "batch_size", "finetune", &f->batch_size);
  Get(j, "seed", "finetune", &f->seed);
  Get(j, "patience", "finetune", &f->patience);
  if (j.contains("batch_reduction")) {
    std::string name;
    Get(j, "batch_reduction", "finetune", &name);
    f->reduction = ParseBatchReduction(name);
  }
}

void ParseSweep(const Json &j, ExperimentConfig *c) {
  CheckKeys(j, "sweep", {"depths", "seeds", "methods", "exclude_babble_low_snr"});
  Get(j, "depths", "sweep", &c->depths);
  Get(j, "seeds", "sweep", &c->seeds);
  Get(j, "exclude_babble_low_snr", "sweep", &c->exclude_babble_low_snr);
  if (j.contains("methods")) {
    std::vector<std::string> names;
    Get(j, "methods", "sweep", &names);
    c->methods.clear();
    for (const auto &n : names) c->methods.push_back(ParseMethod(n));
  }
}

}  // namespace

void ExperimentConfig::Validate() const {
  synth.Validate();
  features.Validate();
  pretrain.Validate();
  finetune.Validate();
  if (depths.empty() || seeds.empty() || methods.empty())
    throw ConfigError("config: sweep depths, seeds and methods must be non-empty");
  for (int d : depths)
    if (d < 1 || d > pretrain.Depth())
      throw ConfigError(StrCat("config: sweep depth ", d, " outside 1..", pretrain.Depth()));
}

SweepOptions ExperimentConfig::Sweep() const {
  SweepOptions o;
  o.depths = depths;
  o.seeds = seeds;
  o.methods = methods;
  o.pretrain = pretrain;
  o.finetune = finetune;
  if (exclude_babble_low_snr)
    o.exclude = DefaultExclusion;
  else
    o.exclude = nullptr;
  return o;
}

ExperimentConfig ParseConfig(const std::string &json_text) {
  Json j;
  try {
    j = Json::parse(json_text);
  } catch (const Json::parse_error &e) {
    throw ConfigError(StrCat("config: invalid JSON: ", e.what()));
  }
  CheckKeys(j, "<root>", {"synth", "features", "pretrain", "finetune", "sweep"});
  ExperimentConfig c;
  if (j.contains("synth")) ParseSynth(j["synth"], &c.synth);
  if (j.contains("features")) ParseFeatures(j["features"], &c.features);
  if (j.contains("pretrain")) ParsePretrain(j["pretrain"], &c.pretrain);
  if (j.contains("finetune")) ParseFinetune(j["finetune"], &c.finetune);
  if (j.contains("sweep")) ParseSweep(j["sweep"], &c);
  c.Validate();
  return c;
}

ExperimentConfig LoadConfig(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(StrCat("cannot open config file '", path, "'"));
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseConfig(ss.str());
}

std::string ConfigToJson(const ExperimentConfig &c) {
  Json j;
  j["synth"] = {{"num_utterances", c.synth.num_utterances},
                {"utterance_seconds", c.synth.utterance_seconds},
                {"speech_fraction", c.synth.speech_fraction},
                {"seed", c.synth.seed},
                {"split_ratios", {c.synth.ratios.train, c.synth.ratios.dev, c.synth.ratios.test}},
                {"noises", c.synth.noises},
                {"snrs_db", c.synth.snrs_db},
                {"sample_rate", c.synth.sample_rate}};
  const auto &f = c.features;
  j["features"] = {{"fft_size", f.fft_size},         {"dft_bands", f.dft_bands},
                   {"mel_filters", f.mel_filters},   {"mfcc_coeffs", f.mfcc_coeffs},
                   {"lpc_order", f.lpc_order},       {"plp_order", f.plp_order},
                   {"plp_bands", f.plp_bands},       {"rasta_pole", f.rasta_pole},
                   {"ams_subbands", f.ams_subbands}, {"ams_mod_bins", f.ams_mod_bins},
                   {"ams_window", f.ams_window},     {"ams_hop", f.ams_hop},
                   {"short_window", f.short_window}, {"long_window", f.long_window},
                   {"pitch_min_hz", f.pitch_min_hz}, {"pitch_max_hz", f.pitch_max_hz},
                   {"voicing_threshold", f.voicing_threshold}};
  j["pretrain"] = {{"layer_sizes", c.pretrain.layer_sizes},
                   {"learning_rate", c.pretrain.learning_rate},
                   {"max_epochs", c.pretrain.max_epochs},
                   {"batch_size", c.pretrain.batch_size},
                   {"seed", c.pretrain.seed},
                   {"batch_reduction", BatchReductionName(c.pretrain.reduction)},
                   {"clean_pretrainer", CleanPretrainerName(c.pretrain.clean_pretrainer)}};
  j["finetune"] = {{"learning_rate", c.finetune.learning_rate},
                   {"max_epochs", c.finetune.max_epochs},
                   {"batch_size", c.finetune.batch_size},
                   {"seed", c.finetune.seed},
                   {"batch_reduction", BatchReductionName(c.finetune.reduction)},
                   {"patience", c.finetune.patience}};
  std::vector<std::string> methods;
  for (auto m : c.methods) methods.push_back(MethodName(m));
  j["sweep"] = {{"depths", c.depths},
                {"seeds", c.seeds},
                {"methods", methods},
                {"exclude_babble_low_snr", c.exclude_babble_low_snr}};
  return j.dump(2) + "\n";
}

}  // namespace ddnn
