// include/ddnn/corpus-io.h

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

#ifndef DDNN_CORPUS_IO_H_
#define DDNN_CORPUS_IO_H_

#include <string>
#include <vector>

#include "ddnn/dataset.h"
#include "ddnn/features.h"

namespace ddnn {

// "white_-5dB", "pink_10dB", ...
std::string CellName(const std::string &noise, double snr_db);

// Writes every utterance (clean reference and noisy mix per condition) as
// 16-bit WAV plus frame labels under `out_dir` and returns the manifest
// (also written to out_dir/manifest.json). Paths are relative to out_dir.
CorpusManifest SynthesizeCorpus(const SynthOptions &options, const std::string &out_dir);

// Reads the WAVs named by a manifest, concatenates each split per condition
// and extracts paired features. `base_dir` resolves relative paths.
std::vector<CorpusCell> ExtractCorpus(const CorpusManifest &manifest,
                                      const std::string &base_dir,
                                      const FeatureConfig &features = {});

// Cell directory: cell.json, {train,dev,test}.noisy.feat, .clean.feat, .labels
void WriteCell(const CorpusCell &cell, const std::string &dir);
CorpusCell ReadCell(const std::string &dir);

// Feature set directory: index.json plus one cell directory per condition.
void WriteFeatureSet(const std::vector<CorpusCell> &cells, const std::string &dir);
// Accepts either a feature set directory or a single cell directory.
std::vector<CorpusCell> ReadFeatureSet(const std::string &dir);

// Picks one cell; noise empty means "the only one".
const CorpusCell &SelectCell(const std::vector<CorpusCell> &cells, const std::string &noise,
                             double snr_db, bool snr_given);

}  // namespace ddnn

#endif  // DDNN_CORPUS_IO_H_
