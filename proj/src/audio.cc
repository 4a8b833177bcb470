// src/audio.cc

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

#include "ddnn/audio.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace ddnn {

static_assert(std::endian::native == std::endian::little,
              "WAV I/O assumes a little-endian host");

void AudioSignal::Validate() const {
  if (sample_rate <= 0)
    throw DataError(StrCat("audio: sample rate must be positive, got ", sample_rate));
  if (samples.empty()) throw DataError("audio: signal is empty");
}

namespace {

template <typename T>
T ReadLe(std::istream &is) {
  T v{};
  is.read(reinterpret_cast<char *>(&v), sizeof(T));
  if (!is) throw DataError("WAV: unexpected end of file");
  return v;
}

template <typename T>
void WriteLe(std::ostream &os, T v) {
  os.write(reinterpret_cast<const char *>(&v), sizeof(T));
}

}  // namespace

AudioSignal ReadWav(const std::string &path, int expected_rate) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError(StrCat("cannot open WAV ", path));
  char tag[4];
  is.read(tag, 4);
  if (!is || std::memcmp(tag, "RIFF", 4) != 0)
    throw DataError(StrCat(path, ": not a RIFF file"));
  ReadLe<std::uint32_t>(is);
  is.read(tag, 4);
  if (!is || std::memcmp(tag, "WAVE", 4) != 0)
    throw DataError(StrCat(path, ": not a WAVE file"));

  bool have_fmt = false;
  std::uint16_t channels = 0, bits = 0, format = 0;
  std::uint32_t rate = 0;
  while (true) {
    is.read(tag, 4);
    if (!is) throw DataError(StrCat(path, ": no data chunk"));
    const auto size = ReadLe<std::uint32_t>(is);
    if (std::memcmp(tag, "fmt ", 4) == 0) {
      format = ReadLe<std::uint16_t>(is);
      channels = ReadLe<std::uint16_t>(is);
      rate = ReadLe<std::uint32_t>(is);
      ReadLe<std::uint32_t>(is);  // byte rate
      ReadLe<std::uint16_t>(is);  // block align
      bits = ReadLe<std::uint16_t>(is);
      if (size > 16) is.ignore(size - 16 + (size & 1));
      have_fmt = true;
    } else if (std::memcmp(tag, "data", 4) == 0) {
      if (!have_fmt) throw DataError(StrCat(path, ": data before fmt chunk"));
      if (format != 1 || bits != 16 || channels != 1)
        throw DataError(StrCat(path, ": only 16-bit PCM mono is supported (format ",
                               format, ", ", bits, " bits, ", channels, " channels)"));
      if (expected_rate > 0 && static_cast<int>(rate) != expected_rate)
        throw DataError(StrCat(path, ": sample rate ", rate, " Hz, expected ",
                               expected_rate, " Hz (resampling not supported)"));
      AudioSignal sig;
      sig.sample_rate = static_cast<int>(rate);
      const std::size_t n = size / 2;
      std::vector<std::int16_t> pcm(n);
      is.read(reinterpret_cast<char *>(pcm.data()), static_cast<std::streamsize>(n * 2));
      if (!is) throw DataError(StrCat(path, ": truncated data chunk"));
      sig.samples.resize(n);
      for (std::size_t i = 0; i < n; ++i) sig.samples[i] = pcm[i] / 32768.0;
      return sig;
    } else {
      is.ignore(size + (size & 1));
    }
  }
}

void WriteWav(const AudioSignal &signal, const std::string &path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError(StrCat("cannot open ", path, " for writing"));
  const auto n = static_cast<std::uint32_t>(signal.samples.size());
  os.write("RIFF", 4);
  WriteLe<std::uint32_t>(os, 36 + 2 * n);
  os.write("WAVE", 4);
  os.write("fmt ", 4);
  WriteLe<std::uint32_t>(os, 16);
  WriteLe<std::uint16_t>(os, 1);
  WriteLe<std::uint16_t>(os, 1);
  WriteLe<std::uint32_t>(os, static_cast<std::uint32_t>(signal.sample_rate));
  WriteLe<std::uint32_t>(os, static_cast<std::uint32_t>(signal.sample_rate) * 2);
  WriteLe<std::uint16_t>(os, 2);
  WriteLe<std::uint16_t>(os, 16);
  os.write("data", 4);
  WriteLe<std::uint32_t>(os, 2 * n);
  for (double s : signal.samples) {
    const double c = std::clamp(s, -1.0, 1.0);
    const auto q = static_cast<std::int16_t>(
        std::clamp(std::lround(c * 32768.0), -32768L, 32767L));
    WriteLe<std::int16_t>(os, q);
  }
  if (!os) throw DataError(StrCat("failed writing ", path));
}

}  // namespace ddnn
