// include/ddnn/audio.h

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

#ifndef DDNN_AUDIO_H_
#define DDNN_AUDIO_H_

#include <string>
#include <vector>

#include "ddnn/common.h"

namespace ddnn {

inline constexpr int kDefaultSampleRate = 8000;

// Mono audio, samples nominally in [-1, 1].
struct AudioSignal {
  std::vector<double> samples;
  int sample_rate = kDefaultSampleRate;

  std::size_t Size() const { return samples.size(); }
  double DurationSeconds() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
  void Validate() const;
};

// 16-bit PCM mono only. A rate other than `expected_rate` is a DataError
// (pass 0 to accept any rate).
AudioSignal ReadWav(const std::string &path, int expected_rate = kDefaultSampleRate);
// Samples are clipped to [-1, 1] and quantized to 16 bits.
void WriteWav(const AudioSignal &signal, const std::string &path);

}  // namespace ddnn

#endif  // DDNN_AUDIO_H_
