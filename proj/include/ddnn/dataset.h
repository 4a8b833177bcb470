// include/ddnn/dataset.h

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

#ifndef DDNN_DATASET_H_
#define DDNN_DATASET_H_

#include <cstdint>
#include <string>
#include <vector>

#include "ddnn/audio.h"
#include "ddnn/common.h"
#include "ddnn/features.h"

namespace ddnn {

// Half-open sample range [begin, end) of active speech.
struct Segment {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t Length() const { return end - begin; }
  bool operator==(const Segment &) const = default;
};

struct LabeledAudio {
  AudioSignal signal;
  std::vector<Segment> speech;  // sorted, non-overlapping
};

// A frame is H1 (1) iff more than half of its samples lie inside speech.
std::vector<int> FrameLabels(std::size_t num_samples,
                             const std::vector<Segment> &speech,
                             const FrameSpec &spec);

// Number of samples covered by `speech`.
std::size_t SpeechSamples(const std::vector<Segment> &speech);

// Voiced harmonic stack with a drifting pitch contour, moving formants and
// syllable-rate amplitude modulation; `num_samples` long.
std::vector<double> SpeechLikeSegment(std::size_t num_samples, int sample_rate,
                                      Rng *rng);

// Alternating speech-like segments and silences (exact zeros), with the
// long-run speech fraction steered towards `speech_fraction`.
LabeledAudio SynthesizeClean(double duration_s, std::uint64_t seed,
                             double speech_fraction = 0.6,
                             int sample_rate = kDefaultSampleRate);

enum class NoiseType { kWhite, kPink, kBabble };

std::string NoiseName(NoiseType type);
NoiseType ParseNoise(const std::string &name);

AudioSignal GenerateNoise(NoiseType type, std::size_t num_samples,
                          std::uint64_t seed,
                          int sample_rate = kDefaultSampleRate);

struct MixResult {
  LabeledAudio noisy;  // shares the clean segments
  LabeledAudio clean;  // reference scaled by the same output gain
  double noise_scale = 1.0;
  double gain = 1.0;
};

// Peak level the mixture is normalized to when it would exceed it.
inline constexpr double kMixPeak = 0.95;

// Scales `noise` (tiled or cropped to the clean length) so that the speech
// power over the speech segments over the noise power over the whole span
// equals snr_db.
MixResult MixAtSnr(const LabeledAudio &clean, const AudioSignal &noise,
                   double snr_db);

// 10 log10(P_speech(clean) / P(noisy - clean)).
double MeasureSnr(const LabeledAudio &clean, const AudioSignal &noisy);

// Sample concatenation; segments are shifted and touching ones merged.
LabeledAudio ConcatenateUtterances(const std::vector<LabeledAudio> &utterances);

enum class Split { kTrain, kDev, kTest };
std::string SplitName(Split split);
Split ParseSplit(const std::string &name);

struct SplitRatios {
  double train = 0.3;
  double dev = 0.3;
  double test = 0.4;
};

// Split assignment per utterance index; depends only on (count, seed).
std::vector<Split> SplitCorpus(int num_utterances, std::uint64_t seed,
                               const SplitRatios &ratios = {});

struct SynthOptions {
  int num_utterances = 20;
  double utterance_seconds = 8.0;
  double speech_fraction = 0.6;
  std::uint64_t seed = 1;
  SplitRatios ratios;
  std::vector<std::string> noises = {"white", "pink", "babble"};
  std::vector<double> snrs_db = {-5.0, 0.0, 5.0, 10.0};
  int sample_rate = kDefaultSampleRate;

  void Validate() const;
};

struct Utterance {
  std::string id;
  int index = 0;
  Split split = Split::kTrain;
  LabeledAudio clean;
};

std::vector<Utterance> SynthesizeUtterances(const SynthOptions &options);

// The noise realization depends on (seed, noise, utterance index) only, so
// different SNR variants of one noise differ just by the noise scale.
MixResult MixUtterance(const Utterance &utt, NoiseType noise, double snr_db,
                       std::uint64_t seed);

// Row-aligned noisy/clean feature matrices with shared labels; row i of
// `noisy` and `clean` come from the same frame of the same recording.
struct PairedFeatures {
  Matrix noisy;
  Matrix clean;
  std::vector<int> labels;

  int NumFrames() const { return static_cast<int>(labels.size()); }
  void Validate() const;
};

PairedFeatures ExtractPaired(const LabeledAudio &noisy, const LabeledAudio &clean,
                             FeatureExtractor *extractor);

struct CorpusCell {
  std::string noise;
  double snr_db = 0.0;
  PairedFeatures train;
  PairedFeatures dev;
  PairedFeatures test;
};

// Synthesizes, mixes, concatenates each split into one long recording and
// extracts paired features for a single (noise, snr) condition.
CorpusCell BuildCorpusCell(const SynthOptions &options, const std::string &noise,
                           double snr_db, const FeatureConfig &features = {});

// One (noise, snr, utterance) row of the manifest.
struct ManifestEntry {
  std::string id;
  Split split = Split::kTrain;
  std::string noise;
  double snr_db = 0.0;
  std::string clean_path;
  std::string noisy_path;
  std::string labels_path;
  std::size_t num_samples = 0;
  std::vector<Segment> speech;
  double measured_snr_db = 0.0;
};

struct CorpusManifest {
  int sample_rate = kDefaultSampleRate;
  std::uint64_t seed = 0;
  FrameSpec frame_spec;
  std::vector<ManifestEntry> entries;

  // Throws DataError on inconsistent cross-SNR splits or segments.
  void Validate() const;
};

void WriteManifest(const CorpusManifest &manifest, const std::string &path);
CorpusManifest ReadManifest(const std::string &path);

}  // namespace ddnn

#endif  // DDNN_DATASET_H_
