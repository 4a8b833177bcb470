// src/corpus-io.cc

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

#include "ddnn/corpus-io.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace ddnn {

namespace fs = std::filesystem;

namespace {

void MakeDirs(const fs::path &p) {
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw DataError(StrCat("cannot create directory '", p.string(), "': ", ec.message()));
}

nlohmann::json ReadJson(const fs::path &p) {
  std::ifstream in(p);
  if (!in) throw DataError(StrCat("cannot open '", p.string(), "'"));
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception &e) {
    throw DataError(StrCat("invalid JSON in '", p.string(), "': ", e.what()));
  }
}

void WriteText(const fs::path &p, const std::string &text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
  if (!out) throw DataError(StrCat("cannot write '", p.string(), "'"));
}

}  // namespace

std::string CellName(const std::string &noise, double snr_db) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%gdB", noise.c_str(), snr_db);
  return buf;
}

CorpusManifest SynthesizeCorpus(const SynthOptions &options, const std::string &out_dir) {
  options.Validate();
  const fs::path root(out_dir);
  MakeDirs(root / "labels");
  const auto utts = SynthesizeUtterances(options);
  const FrameSpec spec;
  CorpusManifest manifest;
  manifest.sample_rate = options.sample_rate;
  manifest.seed = options.seed;
  manifest.frame_spec = spec;
  for (const auto &u : utts) {
    const auto labels = FrameLabels(u.clean.signal.Size(), u.clean.speech, spec);
    WriteLabels(labels, (root / "labels" / (u.id + ".lab")).string());
  }
  for (const auto &noise : options.noises) {
    const NoiseType type = ParseNoise(noise);
    for (double snr : options.snrs_db) {
      const std::string cell = CellName(noise, snr);
      MakeDirs(root / "wav" / cell);
      for (const auto &u : utts) {
        const auto mix = MixUtterance(u, type, snr, options.seed);
        ManifestEntry e;
        e.id = u.id;
        e.split = u.split;
        e.noise = noise;
        e.snr_db = snr;
        e.clean_path = (fs::path("wav") / cell / (u.id + ".clean.wav")).string();
        e.noisy_path = (fs::path("wav") / cell / (u.id + ".noisy.wav")).string();
        e.labels_path = (fs::path("labels") / (u.id + ".lab")).string();
        e.num_samples = u.clean.signal.Size();
        e.speech = u.clean.speech;
        e.measured_snr_db = MeasureSnr(mix.clean, mix.noisy.signal);
        WriteWav(mix.clean.signal, (root / e.clean_path).string());
        WriteWav(mix.noisy.signal, (root / e.noisy_path).string());
        manifest.entries.push_back(std::move(e));
      }
    }
  }
  WriteManifest(manifest, (root / "manifest.json").string());
  return manifest;
}

std::vector<CorpusCell> ExtractCorpus(const CorpusManifest &manifest,
                                      const std::string &base_dir,
                                      const FeatureConfig &features) {
  manifest.Validate();
  if (manifest.entries.empty()) throw DataError("manifest has no entries");
  const fs::path root(base_dir);
  FeatureExtractor extractor(features, manifest.sample_rate, manifest.frame_spec);
  // Conditions in first-seen order; utterances in manifest order.
  std::vector<std::pair<std::string, double>> conditions;
  std::map<std::pair<std::string, double>, std::vector<const ManifestEntry *>> groups;
  for (const auto &e : manifest.entries) {
    const auto key = std::make_pair(e.noise, e.snr_db);
    if (!groups.count(key)) conditions.push_back(key);
    groups[key].push_back(&e);
  }
  std::vector<CorpusCell> cells;
  for (const auto &key : conditions) {
    std::map<Split, std::vector<LabeledAudio>> noisy, clean;
    for (const ManifestEntry *e : groups[key]) {
      LabeledAudio n{ReadWav((root / e->noisy_path).string(), manifest.sample_rate), e->speech};
      LabeledAudio c{ReadWav((root / e->clean_path).string(), manifest.sample_rate), e->speech};
      if (n.signal.Size() != e->num_samples || c.signal.Size() != e->num_samples)
        throw DataError(StrCat("manifest: ", e->id, " length does not match its WAV files"));
      noisy[e->split].push_back(std::move(n));
      clean[e->split].push_back(std::move(c));
    }
    CorpusCell cell;
    cell.noise = key.first;
    cell.snr_db = key.second;
    for (Split s : {Split::kTrain, Split::kDev, Split::kTest}) {
      if (noisy[s].empty())
        throw DataError(StrCat("condition ", CellName(key.first, key.second), " has no ",
                               SplitName(s), " utterances"));
      auto feats = ExtractPaired(ConcatenateUtterances(noisy[s]),
                                 ConcatenateUtterances(clean[s]), &extractor);
      (s == Split::kTrain ? cell.train : s == Split::kDev ? cell.dev : cell.test) =
          std::move(feats);
    }
    cells.push_back(std::move(cell));
  }
  return cells;
}

void WriteCell(const CorpusCell &cell, const std::string &dir) {
  const fs::path root(dir);
  MakeDirs(root);
  for (Split s : {Split::kTrain, Split::kDev, Split::kTest}) {
    const auto &p = s == Split::kTrain ? cell.train : s == Split::kDev ? cell.dev : cell.test;
    p.Validate();
    const std::string name = SplitName(s);
    WriteFeatureMatrix(p.noisy, (root / (name + ".noisy.feat")).string());
    WriteFeatureMatrix(p.clean, (root / (name + ".clean.feat")).string());
    WriteLabels(p.labels, (root / (name + ".labels")).string());
  }
  nlohmann::ordered_json j;
  j["format"] = "ddnn-feature-cell";
  j["noise"] = cell.noise;
  j["snr_db"] = cell.snr_db;
  j["dim"] = cell.train.noisy.cols();
  j["frames"] = {{"train", cell.train.NumFrames()},
                 {"dev", cell.dev.NumFrames()},
                 {"test", cell.test.NumFrames()}};
  WriteText(root / "cell.json", j.dump(2) + "\n");
}

CorpusCell ReadCell(const std::string &dir) {
  const fs::path root(dir);
  const auto j = ReadJson(root / "cell.json");
  CorpusCell cell;
  try {
    if (j.at("format") != "ddnn-feature-cell")
      throw DataError(StrCat("'", dir, "' is not a feature cell"));
    cell.noise = j.at("noise").get<std::string>();
    cell.snr_db = j.at("snr_db").get<double>();
  } catch (const nlohmann::json::exception &e) {
    throw DataError(StrCat("bad cell.json in '", dir, "': ", e.what()));
  }
  for (Split s : {Split::kTrain, Split::kDev, Split::kTest}) {
    const std::string name = SplitName(s);
    PairedFeatures p;
    p.noisy = ReadFeatureMatrix((root / (name + ".noisy.feat")).string());
    p.clean = ReadFeatureMatrix((root / (name + ".clean.feat")).string());
    p.labels = ReadLabels((root / (name + ".labels")).string());
    p.Validate();
    (s == Split::kTrain ? cell.train : s == Split::kDev ? cell.dev : cell.test) = std::move(p);
  }
  return cell;
}

void WriteFeatureSet(const std::vector<CorpusCell> &cells, const std::string &dir) {
  const fs::path root(dir);
  MakeDirs(root);
  nlohmann::ordered_json j;
  j["format"] = "ddnn-feature-set";
  j["cells"] = nlohmann::json::array();
  for (const auto &c : cells) {
    const std::string name = CellName(c.noise, c.snr_db);
    WriteCell(c, (root / name).string());
    j["cells"].push_back({{"noise", c.noise}, {"snr_db", c.snr_db}, {"dir", name}});
  }
  WriteText(root / "index.json", j.dump(2) + "\n");
}

std::vector<CorpusCell> ReadFeatureSet(const std::string &dir) {
  const fs::path root(dir);
  if (fs::exists(root / "cell.json")) return {ReadCell(dir)};
  if (!fs::exists(root / "index.json"))
    throw DataError(StrCat("'", dir, "' has neither index.json nor cell.json"));
  const auto j = ReadJson(root / "index.json");
  std::vector<CorpusCell> cells;
  try {
    if (j.at("format") != "ddnn-feature-set")
      throw DataError(StrCat("'", dir, "' is not a feature set"));
    for (const auto &c : j.at("cells"))
      cells.push_back(ReadCell((root / c.at("dir").get<std::string>()).string()));
  } catch (const nlohmann::json::exception &e) {
    throw DataError(StrCat("bad index.json in '", dir, "': ", e.what()));
  }
  if (cells.empty()) throw DataError(StrCat("feature set '", dir, "' is empty"));
  return cells;
}

const CorpusCell &SelectCell(const std::vector<CorpusCell> &cells, const std::string &noise,
                             double snr_db, bool snr_given) {
  if (noise.empty() && !snr_given) {
    if (cells.size() != 1)
      throw ConfigError(StrCat("feature set has ", cells.size(),
                               " conditions; choose one with --noise and --snr"));
    return cells.front();
  }
  const CorpusCell *found = nullptr;
  for (const auto &c : cells) {
    if (!noise.empty() && c.noise != noise) continue;
    if (snr_given && c.snr_db != snr_db) continue;
    if (found) throw ConfigError("condition selection is ambiguous; give both --noise and --snr");
    found = &c;
  }
  if (!found) throw ConfigError("no condition in the feature set matches --noise/--snr");
  return *found;
}

}  // namespace ddnn
