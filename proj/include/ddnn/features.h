// include/ddnn/features.h

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

#ifndef DDNN_FEATURES_H_
#define DDNN_FEATURES_H_

#include <array>
#include <deque>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ddnn/audio.h"
#include "ddnn/common.h"
#include "ddnn/norm-stats.h"

namespace ddnn {

struct FrameSpec {
  int frame_length = 200;  // 25 ms at 8 kHz
  int frame_shift = 80;    // 10 ms at 8 kHz

  void Validate() const;
};

// floor((n - length) / shift) + 1, or 0 when n < length.
int NumFrames(std::size_t num_samples, const FrameSpec &spec);

// Rows are frames (unwindowed samples). Throws DataError when the signal is
// shorter than one frame.
Matrix FrameSignal(const AudioSignal &signal, const FrameSpec &spec);

// Identifiers in output order.
enum class FeatureId {
  kPitch = 1,
  kDft = 2,
  kDft8 = 3,
  kDft16 = 4,
  kMfcc = 5,
  kMfcc8 = 6,
  kMfcc16 = 7,
  kLpc = 8,
  kRastaPlp = 9,
  kAms = 10,
};

struct FeatureBlock {
  FeatureId id;
  std::string name;
  int offset;
  int dim;
};

// Knobs behind every sub-extractor. Dimensions are checked against the
// fixed 273-dim layout by Validate().
struct FeatureConfig {
  int fft_size = 256;
  int dft_bands = 16;
  int mel_filters = 26;
  int mfcc_coeffs = 20;
  int lpc_order = 12;
  int plp_order = 16;  // emits plp_order + 1 cepstra
  int plp_bands = 17;
  double rasta_pole = 0.94;
  int ams_subbands = 9;
  int ams_mod_bins = 15;
  int ams_window = 32;
  int ams_hop = 8;
  int short_window = 8;
  int long_window = 16;
  double pitch_min_hz = 60.0;
  double pitch_max_hz = 400.0;
  double voicing_threshold = 0.3;

  void Validate() const;
};

inline constexpr int kFeatureDim = 273;

// The ten blocks in ID order with their offsets.
std::vector<FeatureBlock> FeatureLayout(const FeatureConfig &config = {});

// Per-utterance state carried between consecutive frames: trailing windows
// for the long-term DFT/MFCC variants and the RASTA filter memory.
struct FrameHistory {
  std::deque<Vector> dft;
  std::deque<Vector> mfcc;
  bool rasta_started = false;
  std::vector<std::array<double, 4>> rasta_in;  // x[t-1..t-4] per band
  std::vector<double> rasta_out;                // y[t-1] per band
  std::int64_t frames_seen = 0;
};

class RealFft;

// Extracts raw (unnormalized) 273-dim vectors. Not thread-safe; use one
// instance per thread.
class FeatureExtractor {
 public:
  explicit FeatureExtractor(const FeatureConfig &config = {},
                            int sample_rate = kDefaultSampleRate,
                            const FrameSpec &spec = {});
  ~FeatureExtractor();
  FeatureExtractor(FeatureExtractor &&) noexcept;
  FeatureExtractor &operator=(FeatureExtractor &&) noexcept;

  const FeatureConfig &config() const { return config_; }
  const FrameSpec &frame_spec() const { return spec_; }

  // `frame` has frame_length samples; `history` holds earlier frames of the
  // same utterance (empty at the start) and is updated in place.
  Vector ExtractFrame(std::span<const double> frame, FrameHistory *history);

  // Rows are frames, columns the 273 dims.
  Matrix ExtractUtterance(const AudioSignal &signal);

  // Individual frame-local extractors, exposed for testing.
  double Pitch(std::span<const double> frame) const;
  Vector DftBands(std::span<const double> frame);
  Vector Mfcc(std::span<const double> frame);
  Vector Lpc(std::span<const double> frame) const;
  Vector Ams(std::span<const double> frame);

 private:
  void PowerSpectrum(std::span<const double> frame, bool windowed, Vector *power);
  Vector RastaPlp(const Vector &power, FrameHistory *history);

  FeatureConfig config_;
  int sample_rate_;
  FrameSpec spec_;
  Vector hamming_;
  Matrix mel_bank_;   // mel_filters x (fft/2+1)
  Matrix bark_bank_;  // plp_bands x (fft/2+1)
  Vector equal_loudness_;
  Vector ams_window_;
  Vector ams_mod_window_;
  std::vector<std::pair<int, int>> ams_bands_;  // [first, last] bins
  std::unique_ptr<RealFft> fft_;
  std::unique_ptr<RealFft> ams_fft_;
  std::unique_ptr<RealFft> mod_fft_;
  Vector power_;
};

// Levinson-Durbin on autocorrelation r[0..order]. Returns predictor
// coefficients a[1..order] (x[n] ~ sum_k a_k x[n-k]) and the residual energy.
Vector LevinsonDurbin(std::span<const double> autocorr, int order,
                      double *residual = nullptr);

// Rows of `vectors` are samples.
NormStats FitNormStats(const Matrix &vectors);
// Degenerate dims map to 0.5; output clipped to [0, 1].
Vector Normalize(const Vector &vector, const NormStats &stats);
Matrix NormalizeRows(const Matrix &vectors, const NormStats &stats);

// Binary feature container: "DFEA", u32 version, u64 rows, u64 cols,
// row-major float64. Labels are one "0"/"1" per line.
void WriteFeatureMatrix(const Matrix &m, const std::string &path);
Matrix ReadFeatureMatrix(const std::string &path);
void WriteLabels(std::span<const int> labels, const std::string &path);
std::vector<int> ReadLabels(const std::string &path);

}  // namespace ddnn

#endif  // DDNN_FEATURES_H_
