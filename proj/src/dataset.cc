// src/dataset.cc

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

#include "ddnn/dataset.h"

#include <algorithm>
#include <array>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <numeric>

#include "json.hpp"

namespace ddnn {

using std::numbers::pi;

std::vector<int> FrameLabels(std::size_t num_samples,
                             const std::vector<Segment> &speech,
                             const FrameSpec &spec) {
  const int n = NumFrames(num_samples, spec);
  std::vector<int> labels(n, 0);
  std::size_t seg = 0;
  for (int t = 0; t < n; ++t) {
    const std::size_t lo = static_cast<std::size_t>(t) * spec.frame_shift;
    const std::size_t hi = lo + spec.frame_length;
    while (seg < speech.size() && speech[seg].end <= lo) ++seg;
    std::size_t covered = 0;
    for (std::size_t s = seg; s < speech.size() && speech[s].begin < hi; ++s)
      covered += std::min(hi, speech[s].end) - std::max(lo, speech[s].begin);
    labels[t] = 2 * covered > static_cast<std::size_t>(spec.frame_length) ? 1 : 0;
  }
  return labels;
}

std::size_t SpeechSamples(const std::vector<Segment> &speech) {
  std::size_t total = 0;
  for (const auto &s : speech) total += s.Length();
  return total;
}

// --- speech-like synthesis ---------------------------------------------------

std::vector<double> SpeechLikeSegment(std::size_t num_samples, int sample_rate,
                                      Rng *rng) {
  std::vector<double> out(num_samples, 0.0);
  if (num_samples == 0) return out;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double fs = sample_rate;
  const double nyq = fs / 2.0;

  const double f0_base = 90.0 + 130.0 * u(*rng);
  const double vib_rate = 2.0 + 3.0 * u(*rng);
  const double vib_phase = 2.0 * pi * u(*rng);
  const double syl_rate = 3.0 + 3.0 * u(*rng);
  const double syl_phase = 2.0 * pi * u(*rng);
  const double duration = num_samples / fs;

  // Formant targets per syllable, linearly interpolated.
  const int syllables = std::max(2, static_cast<int>(std::ceil(duration * syl_rate)) + 1);
  std::vector<std::array<double, 3>> formants(syllables);
  for (auto &f : formants)
    f = {300.0 + 500.0 * u(*rng), 900.0 + 1300.0 * u(*rng), 2300.0 + 900.0 * u(*rng)};
  const std::array<double, 3> bandwidth = {80.0, 120.0, 180.0};

  constexpr int kBlock = 40;
  constexpr int kMaxHarmonics = 48;
  std::array<double, kMaxHarmonics> phase{};
  for (auto &p : phase) p = 2.0 * pi * u(*rng);
  std::array<double, kMaxHarmonics> amp{};
  const std::size_t ramp = std::min<std::size_t>(num_samples / 2, static_cast<std::size_t>(0.02 * fs));

  for (std::size_t i = 0; i < num_samples; ++i) {
    const double t = i / fs;
    const double f0 = f0_base * (1.0 + 0.08 * std::sin(2.0 * pi * vib_rate * t + vib_phase)) *
                      (1.0 - 0.15 * t / std::max(duration, 1e-9));
    const int nh = std::min(kMaxHarmonics, static_cast<int>((nyq - 200.0) / f0));
    if (i % kBlock == 0) {
      const double pos = t * syl_rate;
      const int k = std::min(syllables - 2, static_cast<int>(pos));
      const double frac = std::clamp(pos - k, 0.0, 1.0);
      for (int h = 0; h < nh; ++h) {
        const double fh = (h + 1) * f0;
        double a = 0.0;
        for (int j = 0; j < 3; ++j) {
          const double fc = formants[k][j] * (1.0 - frac) + formants[k + 1][j] * frac;
          const double x = (fh - fc) / bandwidth[j];
          a += 1.0 / (1.0 + x * x) / (j + 1);
        }
        amp[h] = (0.05 + a) / std::sqrt(h + 1.0);
      }
    }
    double v = 0.0;
    for (int h = 0; h < nh; ++h) {
      phase[h] += 2.0 * pi * (h + 1) * f0 / fs;
      if (phase[h] > 2.0 * pi) phase[h] -= 2.0 * pi;
      v += amp[h] * std::sin(phase[h]);
    }
    const double syl = 0.5 + 0.5 * std::sin(2.0 * pi * syl_rate * t + syl_phase);
    double env = 0.25 + 0.75 * syl * syl;
    if (i < ramp) env *= 0.5 - 0.5 * std::cos(pi * i / ramp);
    if (num_samples - 1 - i < ramp) env *= 0.5 - 0.5 * std::cos(pi * (num_samples - 1 - i) / ramp);
    out[i] = env * (v + 0.05 * gauss(*rng));
  }
  // Normalize to a random level around -20 dBFS RMS.
  double power = 0.0;
  for (double v : out) power += v * v;
  const double rms = std::sqrt(power / num_samples);
  const double target = 0.1 * std::pow(10.0, (u(*rng) - 0.5) * 6.0 / 20.0);
  if (rms > 0.0)
    for (double &v : out) v *= target / rms;
  return out;
}

LabeledAudio SynthesizeClean(double duration_s, std::uint64_t seed,
                             double speech_fraction, int sample_rate) {
  if (!(duration_s > 0.0)) throw ConfigError("SynthesizeClean: duration must be positive");
  if (!(speech_fraction >= 0.0 && speech_fraction <= 1.0))
    throw ConfigError("SynthesizeClean: speech fraction must be in [0, 1]");
  LabeledAudio out;
  out.signal.sample_rate = sample_rate;
  const auto n = static_cast<std::size_t>(std::llround(duration_s * sample_rate));
  out.signal.samples.assign(n, 0.0);
  if (n == 0) return out;
  Rng rng(DeriveSeed(seed, 0x5bee));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  if (speech_fraction <= 0.0) return out;
  if (speech_fraction >= 1.0) {
    out.signal.samples = SpeechLikeSegment(n, sample_rate, &rng);
    out.speech.push_back({0, n});
    return out;
  }

  const double fs = sample_rate;
  std::size_t pos = static_cast<std::size_t>((0.15 + 0.25 * u(rng)) * fs);
  std::size_t speech_total = 0;
  const auto tail = static_cast<std::size_t>(0.15 * fs);
  while (pos + tail + static_cast<std::size_t>(0.3 * fs) < n) {
    const auto len =
        std::min(n - tail - pos, static_cast<std::size_t>((0.6 + 1.0 * u(rng)) * fs));
    const auto seg = SpeechLikeSegment(len, sample_rate, &rng);
    std::copy(seg.begin(), seg.end(), out.signal.samples.begin() + static_cast<std::ptrdiff_t>(pos));
    out.speech.push_back({pos, pos + len});
    speech_total += len;
    pos += len;
    // Pause length steers the running speech fraction towards the target.
    const double wanted_end = speech_total / speech_fraction;
    const double pause = std::max(0.15 * fs, (wanted_end - pos) * (0.8 + 0.4 * u(rng)));
    pos += static_cast<std::size_t>(pause);
  }
  return out;
}

// --- noise ---------------------------------------------------------------------

std::string NoiseName(NoiseType type) {
  switch (type) {
    case NoiseType::kWhite: return "white";
    case NoiseType::kPink: return "pink";
    case NoiseType::kBabble: return "babble";
  }
  return "unknown";
}

NoiseType ParseNoise(const std::string &name) {
  if (name == "white") return NoiseType::kWhite;
  if (name == "pink") return NoiseType::kPink;
  if (name == "babble") return NoiseType::kBabble;
  throw ConfigError(StrCat("unknown noise type '", name, "' (white|pink|babble)"));
}

AudioSignal GenerateNoise(NoiseType type, std::size_t num_samples, std::uint64_t seed,
                          int sample_rate) {
  AudioSignal out;
  out.sample_rate = sample_rate;
  out.samples.assign(num_samples, 0.0);
  Rng rng(DeriveSeed(seed, 0x401e, static_cast<std::uint64_t>(type)));
  std::normal_distribution<double> gauss(0.0, 1.0);
  switch (type) {
    case NoiseType::kWhite:
      for (auto &v : out.samples) v = gauss(rng);
      break;
    case NoiseType::kPink: {
      // Paul Kellet's refined -3 dB/octave filter.
      double b0 = 0, b1 = 0, b2 = 0, b3 = 0, b4 = 0, b5 = 0, b6 = 0;
      for (auto &v : out.samples) {
        const double w = gauss(rng);
        b0 = 0.99886 * b0 + w * 0.0555179;
        b1 = 0.99332 * b1 + w * 0.0750759;
        b2 = 0.96900 * b2 + w * 0.1538520;
        b3 = 0.86650 * b3 + w * 0.3104856;
        b4 = 0.55000 * b4 + w * 0.5329522;
        b5 = -0.7616 * b5 - w * 0.0168980;
        v = b0 + b1 + b2 + b3 + b4 + b5 + b6 + w * 0.5362;
        b6 = w * 0.115926;
      }
      break;
    }
    case NoiseType::kBabble: {
      constexpr int kTalkers = 8;
      const double duration = static_cast<double>(num_samples) / sample_rate;
      if (num_samples == 0) break;
      for (int k = 0; k < kTalkers; ++k) {
        const auto talker = SynthesizeClean(duration, DeriveSeed(seed, 0xbab, k), 0.9, sample_rate);
        for (std::size_t i = 0; i < num_samples && i < talker.signal.Size(); ++i)
          out.samples[i] += talker.signal.samples[i];
      }
      break;
    }
  }
  return out;
}

// --- mixing --------------------------------------------------------------------

namespace {

double SpeechPower(const LabeledAudio &clean) {
  double p = 0.0;
  std::size_t count = 0;
  for (const auto &s : clean.speech) {
    for (std::size_t i = s.begin; i < s.end && i < clean.signal.Size(); ++i)
      p += clean.signal.samples[i] * clean.signal.samples[i];
    count += s.Length();
  }
  return count ? p / static_cast<double>(count) : 0.0;
}

}  // namespace

MixResult MixAtSnr(const LabeledAudio &clean, const AudioSignal &noise, double snr_db) {
  clean.signal.Validate();
  if (noise.samples.empty()) throw DataError("MixAtSnr: noise signal is empty");
  if (noise.sample_rate != clean.signal.sample_rate)
    throw DataError("MixAtSnr: sample-rate mismatch between speech and noise");
  if (!std::isfinite(snr_db)) throw ConfigError("MixAtSnr: SNR must be finite");
  const std::size_t n = clean.signal.Size();
  const double p_speech = SpeechPower(clean);
  if (!(p_speech > 0.0)) throw DataError("MixAtSnr: clean signal has zero speech power");

  std::vector<double> tiled(n);
  for (std::size_t i = 0; i < n; ++i) tiled[i] = noise.samples[i % noise.Size()];
  double p_noise = 0.0;
  for (double v : tiled) p_noise += v * v;
  p_noise /= static_cast<double>(n);
  if (!(p_noise > 0.0)) throw DataError("MixAtSnr: noise has zero power");

  MixResult r;
  r.noise_scale = std::sqrt(p_speech / (p_noise * std::pow(10.0, snr_db / 10.0)));
  r.noisy.signal.sample_rate = clean.signal.sample_rate;
  r.noisy.signal.samples.resize(n);
  double peak = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = clean.signal.samples[i] + r.noise_scale * tiled[i];
    r.noisy.signal.samples[i] = v;
    peak = std::max(peak, std::abs(v));
  }
  r.gain = peak > kMixPeak ? kMixPeak / peak : 1.0;
  r.clean = clean;
  if (r.gain != 1.0) {
    for (double &v : r.noisy.signal.samples) v *= r.gain;
    for (double &v : r.clean.signal.samples) v *= r.gain;
  }
  r.noisy.speech = clean.speech;
  return r;
}

double MeasureSnr(const LabeledAudio &clean, const AudioSignal &noisy) {
  CheckDim(static_cast<std::int64_t>(noisy.Size()),
           static_cast<std::int64_t>(clean.signal.Size()), "MeasureSnr");
  double p_noise = 0.0;
  for (std::size_t i = 0; i < noisy.Size(); ++i) {
    const double d = noisy.samples[i] - clean.signal.samples[i];
    p_noise += d * d;
  }
  p_noise /= static_cast<double>(noisy.Size());
  return 10.0 * std::log10(SpeechPower(clean) / p_noise);
}

LabeledAudio ConcatenateUtterances(const std::vector<LabeledAudio> &utterances) {
  if (utterances.empty()) throw DataError("ConcatenateUtterances: nothing to concatenate");
  LabeledAudio out;
  out.signal.sample_rate = utterances.front().signal.sample_rate;
  std::size_t offset = 0;
  for (const auto &u : utterances) {
    if (u.signal.sample_rate != out.signal.sample_rate)
      throw DataError(StrCat("ConcatenateUtterances: mixed sample rates (",
                             out.signal.sample_rate, " vs ", u.signal.sample_rate, ")"));
    out.signal.samples.insert(out.signal.samples.end(), u.signal.samples.begin(),
                              u.signal.samples.end());
    for (const auto &s : u.speech) {
      Segment shifted{s.begin + offset, s.end + offset};
      if (!out.speech.empty() && out.speech.back().end == shifted.begin)
        out.speech.back().end = shifted.end;
      else
        out.speech.push_back(shifted);
    }
    offset += u.signal.Size();
  }
  return out;
}

// --- splits ----------------------------------------------------------------------

std::string SplitName(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kDev: return "dev";
    case Split::kTest: return "test";
  }
  return "unknown";
}

Split ParseSplit(const std::string &name) {
  if (name == "train") return Split::kTrain;
  if (name == "dev") return Split::kDev;
  if (name == "test") return Split::kTest;
  throw DataError(StrCat("unknown split '", name, "'"));
}

std::vector<Split> SplitCorpus(int num_utterances, std::uint64_t seed,
                               const SplitRatios &ratios) {
  if (ratios.train <= 0 || ratios.dev <= 0 || ratios.test <= 0)
    throw ConfigError("split ratios must be positive");
  const double total = ratios.train + ratios.dev + ratios.test;
  const int n_train = static_cast<int>(std::lround(num_utterances * ratios.train / total));
  const int n_dev = static_cast<int>(std::lround(num_utterances * ratios.dev / total));
  const int n_test = num_utterances - n_train - n_dev;
  if (n_train < 1 || n_dev < 1 || n_test < 1)
    throw DataError(StrCat("SplitCorpus: ", num_utterances,
                           " utterances are not enough for a train/dev/test split"));
  std::vector<int> order(num_utterances);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(DeriveSeed(seed, 0x5b117));
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<Split> out(num_utterances, Split::kTest);
  for (int i = 0; i < n_train; ++i) out[order[i]] = Split::kTrain;
  for (int i = n_train; i < n_train + n_dev; ++i) out[order[i]] = Split::kDev;
  return out;
}

// --- corpus ------------------------------------------------------------------------

void SynthOptions::Validate() const {
  if (num_utterances < 3) throw ConfigError("synth: need at least 3 utterances");
  if (!(utterance_seconds > 0.0)) throw ConfigError("synth: utterance_seconds must be positive");
  if (!(speech_fraction > 0.0 && speech_fraction < 1.0))
    throw ConfigError("synth: speech_fraction must be in (0, 1)");
  if (sample_rate <= 0) throw ConfigError("synth: sample_rate must be positive");
  if (noises.empty() || snrs_db.empty()) throw ConfigError("synth: need noises and SNRs");
  for (const auto &n : noises) ParseNoise(n);
}

std::vector<Utterance> SynthesizeUtterances(const SynthOptions &options) {
  options.Validate();
  const auto splits = SplitCorpus(options.num_utterances, options.seed, options.ratios);
  std::vector<Utterance> utts(options.num_utterances);
  for (int i = 0; i < options.num_utterances; ++i) {
    utts[i].index = i;
    char id[32];
    std::snprintf(id, sizeof(id), "utt%04d", i);
    utts[i].id = id;
    utts[i].split = splits[i];
    utts[i].clean = SynthesizeClean(options.utterance_seconds, DeriveSeed(options.seed, 0xc1ea, i),
                                    options.speech_fraction, options.sample_rate);
  }
  return utts;
}

MixResult MixUtterance(const Utterance &utt, NoiseType noise, double snr_db,
                       std::uint64_t seed) {
  const auto n = GenerateNoise(noise, utt.clean.signal.Size(),
                               DeriveSeed(seed, 0x3a1, static_cast<std::uint64_t>(utt.index)),
                               utt.clean.signal.sample_rate);
  return MixAtSnr(utt.clean, n, snr_db);
}

void PairedFeatures::Validate() const {
  CheckDim(noisy.rows(), static_cast<std::int64_t>(labels.size()), "paired noisy rows");
  CheckDim(clean.rows(), static_cast<std::int64_t>(labels.size()), "paired clean rows");
  CheckDim(clean.cols(), noisy.cols(), "paired feature width");
}

PairedFeatures ExtractPaired(const LabeledAudio &noisy, const LabeledAudio &clean,
                             FeatureExtractor *extractor) {
  CheckDim(static_cast<std::int64_t>(noisy.signal.Size()),
           static_cast<std::int64_t>(clean.signal.Size()), "paired recordings");
  PairedFeatures p;
  p.noisy = extractor->ExtractUtterance(noisy.signal);
  p.clean = extractor->ExtractUtterance(clean.signal);
  p.labels = FrameLabels(clean.signal.Size(), clean.speech, extractor->frame_spec());
  p.Validate();
  return p;
}

CorpusCell BuildCorpusCell(const SynthOptions &options, const std::string &noise,
                           double snr_db, const FeatureConfig &features) {
  const auto utts = SynthesizeUtterances(options);
  const NoiseType type = ParseNoise(noise);
  std::map<Split, std::vector<LabeledAudio>> noisy, clean;
  for (const auto &u : utts) {
    auto mix = MixUtterance(u, type, snr_db, options.seed);
    noisy[u.split].push_back(std::move(mix.noisy));
    clean[u.split].push_back(std::move(mix.clean));
  }
  FeatureExtractor extractor(features, options.sample_rate);
  CorpusCell cell;
  cell.noise = noise;
  cell.snr_db = snr_db;
  auto build = [&](Split s) {
    return ExtractPaired(ConcatenateUtterances(noisy[s]), ConcatenateUtterances(clean[s]),
                         &extractor);
  };
  cell.train = build(Split::kTrain);
  cell.dev = build(Split::kDev);
  cell.test = build(Split::kTest);
  return cell;
}

// --- manifest ----------------------------------------------------------------------

void CorpusManifest::Validate() const {
  if (sample_rate <= 0) throw DataError("manifest: sample_rate must be positive");
  frame_spec.Validate();
  std::map<std::string, std::pair<Split, std::vector<Segment>>> by_id;
  for (const auto &e : entries) {
    if (e.clean_path.empty()) throw DataError(StrCat("manifest: ", e.id, " has no clean path"));
    for (const auto &s : e.speech)
      if (s.begin >= s.end || s.end > e.num_samples)
        throw DataError(StrCat("manifest: ", e.id, " has an invalid speech segment"));
    auto [it, inserted] = by_id.try_emplace(e.id, e.split, e.speech);
    if (!inserted && (it->second.first != e.split || it->second.second != e.speech))
      throw DataError(StrCat("manifest: utterance ", e.id,
                             " has inconsistent split or labels across corpora"));
  }
}

void WriteManifest(const CorpusManifest &m, const std::string &path) {
  m.Validate();
  nlohmann::ordered_json j;
  j["format"] = "ddnn-corpus-manifest";
  j["version"] = 1;
  j["sample_rate"] = m.sample_rate;
  j["seed"] = m.seed;
  j["frame_length"] = m.frame_spec.frame_length;
  j["frame_shift"] = m.frame_spec.frame_shift;
  auto &arr = j["utterances"] = nlohmann::ordered_json::array();
  for (const auto &e : m.entries) {
    nlohmann::ordered_json u;
    u["id"] = e.id;
    u["split"] = SplitName(e.split);
    u["noise"] = e.noise;
    u["snr_db"] = e.snr_db;
    u["clean"] = e.clean_path;
    u["noisy"] = e.noisy_path;
    u["labels"] = e.labels_path;
    u["num_samples"] = e.num_samples;
    u["measured_snr_db"] = e.measured_snr_db;
    auto segs = nlohmann::ordered_json::array();
    for (const auto &s : e.speech) segs.push_back({s.begin, s.end});
    u["speech"] = segs;
    arr.push_back(u);
  }
  std::ofstream os(path);
  if (!os) throw DataError(StrCat("cannot open ", path, " for writing"));
  os << j.dump(1) << '\n';
  if (!os) throw DataError(StrCat("failed writing ", path));
}

CorpusManifest ReadManifest(const std::string &path) {
  std::ifstream is(path);
  if (!is) throw DataError(StrCat("cannot open manifest ", path));
  CorpusManifest m;
  try {
    const auto j = nlohmann::json::parse(is);
    if (j.value("format", "") != "ddnn-corpus-manifest")
      throw DataError(StrCat(path, ": not a corpus manifest"));
    m.sample_rate = j.at("sample_rate").get<int>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.frame_spec.frame_length = j.at("frame_length").get<int>();
    m.frame_spec.frame_shift = j.at("frame_shift").get<int>();
    for (const auto &u : j.at("utterances")) {
      ManifestEntry e;
      e.id = u.at("id").get<std::string>();
      e.split = ParseSplit(u.at("split").get<std::string>());
      e.noise = u.at("noise").get<std::string>();
      e.snr_db = u.at("snr_db").get<double>();
      e.clean_path = u.at("clean").get<std::string>();
      e.noisy_path = u.at("noisy").get<std::string>();
      e.labels_path = u.value("labels", "");
      e.num_samples = u.at("num_samples").get<std::size_t>();
      e.measured_snr_db = u.value("measured_snr_db", 0.0);
      for (const auto &s : u.at("speech"))
        e.speech.push_back({s.at(0).get<std::size_t>(), s.at(1).get<std::size_t>()});
      m.entries.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception &ex) {
    throw DataError(StrCat(path, ": malformed manifest: ", ex.what()));
  }
  m.Validate();
  return m;
}

}  // namespace ddnn
