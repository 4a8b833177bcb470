// src/features.cc

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

#include "ddnn/features.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <mutex>
#include <numbers>

#include <fftw3.h>

namespace ddnn {

using std::numbers::pi;

// --- framing --------------------------------------------------------------

void FrameSpec::Validate() const {
  if (frame_length <= 0 || frame_shift <= 0 || frame_shift > frame_length)
    throw ConfigError(StrCat("frame spec requires 0 < shift <= length (length ",
                             frame_length, ", shift ", frame_shift, ")"));
}

int NumFrames(std::size_t num_samples, const FrameSpec &spec) {
  spec.Validate();
  const auto len = static_cast<std::size_t>(spec.frame_length);
  if (num_samples < len) return 0;
  return static_cast<int>((num_samples - len) / spec.frame_shift + 1);
}

Matrix FrameSignal(const AudioSignal &signal, const FrameSpec &spec) {
  signal.Validate();
  const int n = NumFrames(signal.Size(), spec);
  if (n == 0)
    throw DataError(StrCat("signal of ", signal.Size(),
                           " samples is shorter than one frame (",
                           spec.frame_length, ")"));
  Matrix frames(n, spec.frame_length);
  for (int t = 0; t < n; ++t)
    for (int i = 0; i < spec.frame_length; ++i)
      frames(t, i) = signal.samples[static_cast<std::size_t>(t) * spec.frame_shift + i];
  return frames;
}

// --- FFT ------------------------------------------------------------------

namespace {
std::mutex &FftwPlannerMutex() {
  static std::mutex m;
  return m;
}
}  // namespace

// Thin RAII wrapper over an FFTW r2c plan of fixed size.
class RealFft {
 public:
  explicit RealFft(int n) : n_(n) {
    std::lock_guard<std::mutex> lock(FftwPlannerMutex());
    in_ = fftw_alloc_real(n);
    out_ = fftw_alloc_complex(n / 2 + 1);
    plan_ = fftw_plan_dft_r2c_1d(n, in_, out_, FFTW_ESTIMATE);
  }
  ~RealFft() {
    std::lock_guard<std::mutex> lock(FftwPlannerMutex());
    fftw_destroy_plan(plan_);
    fftw_free(in_);
    fftw_free(out_);
  }
  RealFft(const RealFft &) = delete;
  RealFft &operator=(const RealFft &) = delete;

  int Size() const { return n_; }
  int NumBins() const { return n_ / 2 + 1; }

  // |X_k|^2 for k = 0..n/2 of `x` zero-padded to n.
  void Power(std::span<const double> x, Vector *power) {
    const std::size_t m = std::min<std::size_t>(x.size(), n_);
    std::copy_n(x.begin(), m, in_);
    std::fill(in_ + m, in_ + n_, 0.0);
    fftw_execute(plan_);
    power->resize(NumBins());
    for (int k = 0; k < NumBins(); ++k)
      (*power)[k] = out_[k][0] * out_[k][0] + out_[k][1] * out_[k][1];
  }

 private:
  int n_;
  double *in_ = nullptr;
  fftw_complex *out_ = nullptr;
  fftw_plan plan_ = nullptr;
};

// --- config / layout ------------------------------------------------------

namespace {

int NextPow2(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

int AmsPositions(const FeatureConfig &c, const FrameSpec &spec) {
  return (spec.frame_length - c.ams_window) / c.ams_hop + 1;
}

void CheckBlockDim(FeatureId id, const char *name, int got, int expected) {
  if (got != expected)
    throw ConfigError(StrCat("feature ", static_cast<int>(id), " (", name,
                             "): configured dimension ", got, ", expected ",
                             expected));
}

}  // namespace

void FeatureConfig::Validate() const {
  CheckBlockDim(FeatureId::kDft, "DFT", dft_bands, 16);
  CheckBlockDim(FeatureId::kMfcc, "MFCC", mfcc_coeffs, 20);
  CheckBlockDim(FeatureId::kLpc, "LPC", lpc_order, 12);
  CheckBlockDim(FeatureId::kRastaPlp, "RASTA-PLP", plp_order + 1, 17);
  CheckBlockDim(FeatureId::kAms, "AMS", ams_subbands * ams_mod_bins, 135);
  if (fft_size < 2 || (fft_size & (fft_size - 1)) != 0)
    throw ConfigError(StrCat("fft_size must be a power of two, got ", fft_size));
  if (mel_filters < mfcc_coeffs)
    throw ConfigError("feature 5 (MFCC): fewer mel filters than coefficients");
  if (plp_bands < 3) throw ConfigError("feature 9 (RASTA-PLP): need >= 3 bands");
  if (short_window <= 0 || long_window < short_window)
    throw ConfigError("long-term window lengths must satisfy 0 < short <= long");
  if (ams_window <= 0 || ams_hop <= 0)
    throw ConfigError("feature 10 (AMS): window and hop must be positive");
  if (pitch_min_hz <= 0 || pitch_max_hz <= pitch_min_hz)
    throw ConfigError("feature 1 (Pitch): invalid search range");
}

std::vector<FeatureBlock> FeatureLayout(const FeatureConfig &c) {
  c.Validate();
  std::vector<FeatureBlock> blocks = {
      {FeatureId::kPitch, "Pitch", 0, 1},
      {FeatureId::kDft, "DFT", 0, c.dft_bands},
      {FeatureId::kDft8, "DFT_8", 0, c.dft_bands},
      {FeatureId::kDft16, "DFT_16", 0, c.dft_bands},
      {FeatureId::kMfcc, "MFCC", 0, c.mfcc_coeffs},
      {FeatureId::kMfcc8, "MFCC_8", 0, c.mfcc_coeffs},
      {FeatureId::kMfcc16, "MFCC_16", 0, c.mfcc_coeffs},
      {FeatureId::kLpc, "LPC", 0, c.lpc_order},
      {FeatureId::kRastaPlp, "RASTA-PLP", 0, c.plp_order + 1},
      {FeatureId::kAms, "AMS", 0, c.ams_subbands * c.ams_mod_bins},
  };
  int offset = 0;
  for (auto &b : blocks) {
    b.offset = offset;
    offset += b.dim;
  }
  if (offset != kFeatureDim)
    throw ConfigError(StrCat("feature layout totals ", offset, ", expected ", kFeatureDim));
  return blocks;
}

// --- extractor ------------------------------------------------------------

namespace {

double HzToMel(double f) { return 2595.0 * std::log10(1.0 + f / 700.0); }
double MelToHz(double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); }
double HzToBark(double f) { return 6.0 * std::asinh(f / 600.0); }
double BarkToHz(double z) { return 600.0 * std::sinh(z / 6.0); }

Vector Hamming(int n) {
  Vector w(n);
  for (int i = 0; i < n; ++i) w[i] = 0.54 - 0.46 * std::cos(2.0 * pi * i / (n - 1));
  return w;
}

Vector Hann(int n) {
  Vector w(n);
  for (int i = 0; i < n; ++i) w[i] = 0.5 - 0.5 * std::cos(2.0 * pi * i / (n - 1));
  return w;
}

// Mean of the newest `window` entries, missing (pre-utterance) ones count as 0.
Vector TrailingMean(const std::deque<Vector> &hist, int window) {
  Vector acc = Vector::Zero(hist.back().size());
  const int avail = std::min<int>(window, static_cast<int>(hist.size()));
  for (int i = 0; i < avail; ++i) acc += hist[hist.size() - 1 - i];
  return acc / static_cast<double>(window);
}

void PushHistory(std::deque<Vector> *hist, const Vector &v, int cap) {
  hist->push_back(v);
  while (static_cast<int>(hist->size()) > cap) hist->pop_front();
}

// Cepstra c_0..c_{n-1} of the all-pole model with prediction-error filter
// 1 + sum alpha_k z^-k and gain `residual`.
Vector AllPoleCepstrum(const Vector &predictor, double residual, int n) {
  const int p = static_cast<int>(predictor.size());
  Vector alpha = Vector::Zero(std::max(n, p + 1));
  alpha[0] = 1.0;
  for (int k = 1; k <= p; ++k) alpha[k] = -predictor[k - 1];
  Vector c = Vector::Zero(n);
  c[0] = std::log(std::max(residual, 1e-300));
  for (int m = 1; m < n; ++m) {
    double sum = 0.0;
    for (int k = 1; k < m; ++k) sum += (m - k) * alpha[k] * c[m - k];
    c[m] = -(alpha[m] + sum / m);
  }
  return c;
}

}  // namespace

Vector LevinsonDurbin(std::span<const double> r, int order, double *residual) {
  if (static_cast<int>(r.size()) < order + 1)
    throw DataError("LevinsonDurbin: autocorrelation too short for order");
  Vector a = Vector::Zero(order);
  double err = r[0];
  if (err <= 0.0) {
    if (residual) *residual = 0.0;
    return a;
  }
  Vector prev(order);
  for (int i = 1; i <= order; ++i) {
    double acc = r[i];
    for (int j = 1; j < i; ++j) acc -= a[j - 1] * r[i - j];
    const double k = acc / err;
    prev = a;
    a[i - 1] = k;
    for (int j = 1; j < i; ++j) a[j - 1] = prev[j - 1] - k * prev[i - j - 1];
    err *= (1.0 - k * k);
    if (err <= 0.0) {
      err = 0.0;
      break;
    }
  }
  if (residual) *residual = err;
  return a;
}

FeatureExtractor::FeatureExtractor(const FeatureConfig &config, int sample_rate,
                                   const FrameSpec &spec)
    : config_(config), sample_rate_(sample_rate), spec_(spec) {
  config_.Validate();
  spec_.Validate();
  if (sample_rate_ <= 0) throw ConfigError("sample rate must be positive");
  if (spec_.frame_length > config_.fft_size)
    throw ConfigError(StrCat("frame length ", spec_.frame_length,
                             " exceeds fft_size ", config_.fft_size));
  if (AmsPositions(config_, spec_) < 2)
    throw ConfigError("feature 10 (AMS): frame too short for envelope analysis");

  hamming_ = Hamming(spec_.frame_length);
  fft_ = std::make_unique<RealFft>(config_.fft_size);
  const int nbins = fft_->NumBins();
  const double nyquist = sample_rate_ / 2.0;
  auto bin_hz = [&](int k) { return static_cast<double>(k) * sample_rate_ / config_.fft_size; };

  // Triangular mel filters spanning 0..nyquist.
  mel_bank_ = Matrix::Zero(config_.mel_filters, nbins);
  const double mel_max = HzToMel(nyquist);
  std::vector<double> edges(config_.mel_filters + 2);
  for (std::size_t i = 0; i < edges.size(); ++i)
    edges[i] = MelToHz(mel_max * i / (config_.mel_filters + 1));
  for (int m = 0; m < config_.mel_filters; ++m) {
    const double lo = edges[m], mid = edges[m + 1], hi = edges[m + 2];
    for (int k = 0; k < nbins; ++k) {
      const double f = bin_hz(k);
      if (f > lo && f < hi)
        mel_bank_(m, k) = f <= mid ? (f - lo) / (mid - lo) : (hi - f) / (hi - mid);
    }
  }

  // Critical-band (Bark) integration and equal-loudness curve.
  bark_bank_ = Matrix::Zero(config_.plp_bands, nbins);
  equal_loudness_ = Vector::Zero(config_.plp_bands);
  const double bark_max = HzToBark(nyquist);
  const double bark_step = bark_max / (config_.plp_bands - 1);
  for (int b = 0; b < config_.plp_bands; ++b) {
    const double center = b * bark_step;
    for (int k = 0; k < nbins; ++k) {
      const double z = HzToBark(bin_hz(k));
      const double lof = z - center - 0.5;
      const double hif = z - center + 0.5;
      bark_bank_(b, k) = std::pow(10.0, std::min(0.0, std::min(hif, -2.5 * lof)));
    }
    const double fsq = std::pow(BarkToHz(center), 2);
    const double ftmp = fsq + 1.6e5;
    equal_loudness_[b] = std::pow(fsq / ftmp, 2) * ((fsq + 1.44e6) / (fsq + 9.61e6));
  }

  // Amplitude-modulation analysis: short-time envelopes inside the frame.
  ams_window_ = Hann(config_.ams_window);
  ams_fft_ = std::make_unique<RealFft>(NextPow2(config_.ams_window));
  const int positions = AmsPositions(config_, spec_);
  ams_mod_window_ = Hann(positions);
  mod_fft_ = std::make_unique<RealFft>(NextPow2(positions));
  if (mod_fft_->NumBins() - 1 < config_.ams_mod_bins)
    throw ConfigError("feature 10 (AMS): too few modulation bins for the frame length");
  const int env_bins = ams_fft_->NumBins() - 1;  // bins 1..n/2, DC skipped
  if (env_bins < config_.ams_subbands)
    throw ConfigError("feature 10 (AMS): more subbands than spectral bins");
  // Log-spaced subband edges over bins [1, env_bins].
  std::vector<int> e(config_.ams_subbands + 1);
  for (int i = 0; i <= config_.ams_subbands; ++i)
    e[i] = static_cast<int>(std::lround(
        std::exp(std::log(env_bins + 1.0) * i / config_.ams_subbands)));
  for (int i = 1; i <= config_.ams_subbands; ++i) e[i] = std::max(e[i], e[i - 1] + 1);
  e[config_.ams_subbands] = env_bins + 1;
  for (int i = config_.ams_subbands - 1; i > 0; --i) e[i] = std::min(e[i], e[i + 1] - 1);
  for (int i = 0; i < config_.ams_subbands; ++i) ams_bands_.emplace_back(e[i], e[i + 1] - 1);
}

FeatureExtractor::~FeatureExtractor() = default;
FeatureExtractor::FeatureExtractor(FeatureExtractor &&) noexcept = default;
FeatureExtractor &FeatureExtractor::operator=(FeatureExtractor &&) noexcept = default;

void FeatureExtractor::PowerSpectrum(std::span<const double> frame, bool windowed,
                                     Vector *power) {
  CheckDim(static_cast<std::int64_t>(frame.size()), spec_.frame_length, "frame");
  if (windowed) {
    Vector w(spec_.frame_length);
    for (int i = 0; i < spec_.frame_length; ++i) w[i] = frame[i] * hamming_[i];
    fft_->Power(std::span<const double>(w.data(), w.size()), power);
  } else {
    fft_->Power(frame, power);
  }
}

double FeatureExtractor::Pitch(std::span<const double> frame) const {
  const int n = static_cast<int>(frame.size());
  CheckDim(n, spec_.frame_length, "pitch frame");
  double mean = 0.0;
  for (double v : frame) mean += v;
  mean /= n;
  std::vector<double> x(n);
  double energy = 0.0;
  for (int i = 0; i < n; ++i) {
    x[i] = frame[i] - mean;
    energy += x[i] * x[i];
  }
  if (energy < 1e-10) return 0.0;

  const int min_lag = std::max(1, static_cast<int>(std::floor(sample_rate_ / config_.pitch_max_hz)));
  const int max_lag = std::min(n - 2, static_cast<int>(std::ceil(sample_rate_ / config_.pitch_min_hz)));
  if (max_lag <= min_lag + 1) return 0.0;

  // Normalized cross-correlation over the overlapping span.
  std::vector<double> nccf(max_lag + 2, 0.0);
  for (int k = min_lag - 1; k <= max_lag + 1 && k < n; ++k) {
    double num = 0.0, e0 = 0.0, e1 = 0.0;
    for (int i = 0; i + k < n; ++i) {
      num += x[i] * x[i + k];
      e0 += x[i] * x[i];
      e1 += x[i + k] * x[i + k];
    }
    nccf[k] = (e0 > 0.0 && e1 > 0.0) ? num / std::sqrt(e0 * e1) : 0.0;
  }
  int best = min_lag;
  for (int k = min_lag; k <= max_lag; ++k)
    if (nccf[k] > nccf[best]) best = k;
  if (nccf[best] < config_.voicing_threshold) return 0.0;
  // Prefer the shortest lag whose peak is nearly as strong (avoids
  // picking a sub-harmonic).
  for (int k = min_lag; k < best; ++k) {
    if (nccf[k] >= 0.9 * nccf[best] && nccf[k] >= nccf[k - 1] && nccf[k] >= nccf[k + 1]) {
      best = k;
      break;
    }
  }
  double lag = best;
  const double a = nccf[best - 1], b = nccf[best], c = nccf[best + 1];
  const double denom = a - 2.0 * b + c;
  if (denom < 0.0) lag += std::clamp(0.5 * (a - c) / denom, -0.5, 0.5);
  return sample_rate_ / lag;
}

Vector FeatureExtractor::DftBands(std::span<const double> frame) {
  Vector power;
  PowerSpectrum(frame, true, &power);
  const int nbins = static_cast<int>(power.size());
  const int bands = config_.dft_bands;
  Vector out(bands);
  for (int b = 0; b < bands; ++b) {
    const int lo = b * (nbins - 1) / bands;
    const int hi = b == bands - 1 ? nbins : (b + 1) * (nbins - 1) / bands;
    double acc = 0.0;
    for (int k = lo; k < hi; ++k) acc += 0.5 * std::log(power[k] + 1e-16);
    out[b] = acc / (hi - lo);
  }
  return out;
}

Vector FeatureExtractor::Mfcc(std::span<const double> frame) {
  Vector power;
  PowerSpectrum(frame, true, &power);
  const Vector energies = mel_bank_ * power;
  const int m = config_.mel_filters;
  Vector log_e(m);
  for (int i = 0; i < m; ++i) log_e[i] = std::log(std::max(energies[i], 1e-10));
  Vector c(config_.mfcc_coeffs);
  for (int k = 0; k < config_.mfcc_coeffs; ++k) {
    double acc = 0.0;
    for (int i = 0; i < m; ++i) acc += log_e[i] * std::cos(pi * k * (i + 0.5) / m);
    c[k] = acc * std::sqrt((k == 0 ? 1.0 : 2.0) / m);
  }
  return c;
}

Vector FeatureExtractor::Lpc(std::span<const double> frame) const {
  const int n = static_cast<int>(frame.size());
  CheckDim(n, spec_.frame_length, "LPC frame");
  const int p = config_.lpc_order;
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = frame[i] * hamming_[i];
  std::vector<double> r(p + 1, 0.0);
  for (int k = 0; k <= p; ++k)
    for (int i = 0; i + k < n; ++i) r[k] += w[i] * w[i + k];
  if (r[0] < 1e-12) return Vector::Zero(p);
  r[0] *= 1.0 + 1e-9;
  return LevinsonDurbin(r, p);
}

Vector FeatureExtractor::RastaPlp(const Vector &power, FrameHistory *history) {
  const int nb = config_.plp_bands;
  const Vector bands = bark_bank_ * power;
  std::vector<double> log_b(nb);
  for (int b = 0; b < nb; ++b) log_b[b] = std::log(std::max(bands[b], 1e-10));

  if (!history->rasta_started) {
    // Steady-state start: constant input gives zero filter output.
    history->rasta_in.assign(nb, {});
    history->rasta_out.assign(nb, 0.0);
    for (int b = 0; b < nb; ++b) history->rasta_in[b].fill(log_b[b]);
    history->rasta_started = true;
  }
  // H(z) = 0.1 (2 + z^-1 - z^-3 - 2 z^-4) / (1 - pole z^-1)
  Vector aud(nb);
  for (int b = 0; b < nb; ++b) {
    auto &xi = history->rasta_in[b];
    const double y = config_.rasta_pole * history->rasta_out[b] + 0.2 * log_b[b] +
                     0.1 * xi[0] - 0.1 * xi[2] - 0.2 * xi[3];
    xi = {log_b[b], xi[0], xi[1], xi[2]};
    history->rasta_out[b] = y;
    aud[b] = std::pow(std::exp(y) * equal_loudness_[b], 0.33);
  }
  aud[0] = aud[1];
  aud[nb - 1] = aud[nb - 2];

  // Autocorrelation of the auditory spectrum via its even extension.
  const int p = config_.plp_order;
  const int len = 2 * (nb - 1);
  std::vector<double> r(p + 1, 0.0);
  for (int k = 0; k <= p; ++k) {
    double acc = 0.0;
    for (int m = 0; m < len; ++m) {
      const double s = m < nb ? aud[m] : aud[len - m];
      acc += s * std::cos(2.0 * pi * k * m / len);
    }
    r[k] = acc / len;
  }
  double residual = 0.0;
  const Vector predictor = LevinsonDurbin(r, p, &residual);
  return AllPoleCepstrum(predictor, residual, p + 1);
}

Vector FeatureExtractor::Ams(std::span<const double> frame) {
  CheckDim(static_cast<std::int64_t>(frame.size()), spec_.frame_length, "AMS frame");
  const int positions = AmsPositions(config_, spec_);
  const int subbands = config_.ams_subbands;
  Matrix env(subbands, positions);
  Vector seg(config_.ams_window), power;
  for (int t = 0; t < positions; ++t) {
    const int start = t * config_.ams_hop;
    for (int i = 0; i < config_.ams_window; ++i) seg[i] = frame[start + i] * ams_window_[i];
    ams_fft_->Power(std::span<const double>(seg.data(), seg.size()), &power);
    for (int b = 0; b < subbands; ++b) {
      double acc = 0.0;
      for (int k = ams_bands_[b].first; k <= ams_bands_[b].second; ++k) acc += power[k];
      env(b, t) = std::sqrt(acc);
    }
  }
  Vector out(subbands * config_.ams_mod_bins);
  Vector trace(positions), mod;
  for (int b = 0; b < subbands; ++b) {
    const double mean = env.row(b).mean();
    for (int t = 0; t < positions; ++t) trace[t] = (env(b, t) - mean) * ams_mod_window_[t];
    mod_fft_->Power(std::span<const double>(trace.data(), trace.size()), &mod);
    for (int m = 0; m < config_.ams_mod_bins; ++m)
      out[b * config_.ams_mod_bins + m] = 0.5 * std::log(mod[m + 1] + 1e-16);
  }
  return out;
}

Vector FeatureExtractor::ExtractFrame(std::span<const double> frame,
                                      FrameHistory *history) {
  CheckDim(static_cast<std::int64_t>(frame.size()), spec_.frame_length, "frame");
  Vector out(kFeatureDim);
  int pos = 0;
  auto put = [&](const Vector &v) {
    out.segment(pos, v.size()) = v;
    pos += static_cast<int>(v.size());
  };

  out[pos++] = Pitch(frame);

  const Vector dft = DftBands(frame);
  PushHistory(&history->dft, dft, config_.long_window);
  put(dft);
  put(TrailingMean(history->dft, config_.short_window));
  put(TrailingMean(history->dft, config_.long_window));

  const Vector mfcc = Mfcc(frame);
  PushHistory(&history->mfcc, mfcc, config_.long_window);
  put(mfcc);
  put(TrailingMean(history->mfcc, config_.short_window));
  put(TrailingMean(history->mfcc, config_.long_window));

  put(Lpc(frame));

  PowerSpectrum(frame, true, &power_);
  put(RastaPlp(power_, history));

  put(Ams(frame));
  history->frames_seen++;
  if (pos != kFeatureDim)
    throw ConfigError(StrCat("extracted ", pos, " dims, expected ", kFeatureDim));
  return out;
}

Matrix FeatureExtractor::ExtractUtterance(const AudioSignal &signal) {
  signal.Validate();
  if (signal.sample_rate != sample_rate_)
    throw DataError(StrCat("audio at ", signal.sample_rate, " Hz, extractor expects ",
                           sample_rate_, " Hz"));
  const int n = NumFrames(signal.Size(), spec_);
  if (n == 0)
    throw DataError(StrCat("signal of ", signal.Size(),
                           " samples is shorter than one frame"));
  Matrix feats(n, kFeatureDim);
  FrameHistory history;
  for (int t = 0; t < n; ++t) {
    std::span<const double> frame(signal.samples.data() + static_cast<std::size_t>(t) * spec_.frame_shift,
                                  spec_.frame_length);
    feats.row(t) = ExtractFrame(frame, &history).transpose();
  }
  return feats;
}

// --- normalization ----------------------------------------------------------

NormStats FitNormStats(const Matrix &vectors) {
  if (vectors.rows() == 0 || vectors.cols() == 0)
    throw DataError("FitNormStats: empty training set");
  if (!vectors.allFinite()) throw NumericalError("FitNormStats: non-finite feature values");
  NormStats s;
  s.min = vectors.colwise().minCoeff().transpose();
  s.max = vectors.colwise().maxCoeff().transpose();
  return s;
}

Vector Normalize(const Vector &v, const NormStats &stats) {
  CheckDim(v.size(), stats.Dim(), "Normalize");
  Vector out(v.size());
  for (Eigen::Index d = 0; d < v.size(); ++d) {
    const double range = stats.max[d] - stats.min[d];
    out[d] = range > 0.0 ? std::clamp((v[d] - stats.min[d]) / range, 0.0, 1.0) : 0.5;
  }
  return out;
}

Matrix NormalizeRows(const Matrix &vectors, const NormStats &stats) {
  CheckDim(vectors.cols(), stats.Dim(), "NormalizeRows");
  Matrix out(vectors.rows(), vectors.cols());
  for (Eigen::Index r = 0; r < vectors.rows(); ++r)
    out.row(r) = Normalize(vectors.row(r).transpose(), stats).transpose();
  return out;
}

// --- containers -------------------------------------------------------------

namespace {
static_assert(std::endian::native == std::endian::little);
constexpr char kFeatMagic[4] = {'D', 'F', 'E', 'A'};
constexpr std::uint32_t kFeatVersion = 1;
}  // namespace

void WriteFeatureMatrix(const Matrix &m, const std::string &path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError(StrCat("cannot open ", path, " for writing"));
  os.write(kFeatMagic, 4);
  const std::uint32_t version = kFeatVersion;
  const std::uint64_t rows = m.rows(), cols = m.cols();
  os.write(reinterpret_cast<const char *>(&version), 4);
  os.write(reinterpret_cast<const char *>(&rows), 8);
  os.write(reinterpret_cast<const char *>(&cols), 8);
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const double v = m(r, c);
      os.write(reinterpret_cast<const char *>(&v), 8);
    }
  if (!os) throw DataError(StrCat("failed writing ", path));
}

Matrix ReadFeatureMatrix(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError(StrCat("cannot open feature file ", path));
  char magic[4];
  std::uint32_t version = 0;
  std::uint64_t rows = 0, cols = 0;
  is.read(magic, 4);
  is.read(reinterpret_cast<char *>(&version), 4);
  is.read(reinterpret_cast<char *>(&rows), 8);
  is.read(reinterpret_cast<char *>(&cols), 8);
  if (!is || std::memcmp(magic, kFeatMagic, 4) != 0)
    throw DataError(StrCat(path, ": not a feature matrix file"));
  if (version != kFeatVersion)
    throw DataError(StrCat(path, ": unsupported feature file version ", version));
  if (cols > 1u << 20 || rows > 1u << 28)
    throw DataError(StrCat(path, ": implausible dimensions ", rows, "x", cols));
  Matrix m(rows, cols);
  std::vector<double> row(cols);
  for (std::uint64_t r = 0; r < rows; ++r) {
    is.read(reinterpret_cast<char *>(row.data()), static_cast<std::streamsize>(cols * 8));
    if (!is) throw DataError(StrCat(path, ": truncated"));
    for (std::uint64_t c = 0; c < cols; ++c) m(r, c) = row[c];
  }
  return m;
}

void WriteLabels(std::span<const int> labels, const std::string &path) {
  std::ofstream os(path);
  if (!os) throw DataError(StrCat("cannot open ", path, " for writing"));
  for (int y : labels) os << (y ? '1' : '0') << '\n';
  if (!os) throw DataError(StrCat("failed writing ", path));
}

std::vector<int> ReadLabels(const std::string &path) {
  std::ifstream is(path);
  if (!is) throw DataError(StrCat("cannot open labels ", path));
  std::vector<int> labels;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line != "0" && line != "1")
      throw DataError(StrCat(path, ":", lineno, ": label must be 0 or 1, got '", line, "'"));
    labels.push_back(line == "1");
  }
  return labels;
}

}  // namespace ddnn
