// include/ddnn/common.h

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

#ifndef DDNN_COMMON_H_
#define DDNN_COMMON_H_

#include <cstdint>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace ddnn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Error categories map one-to-one onto the CLI exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int ExitCode() const { return 1; }
};

class ConfigError : public Error {
 public:
  using Error::Error;
  int ExitCode() const override { return 2; }
};

class DataError : public Error {
 public:
  using Error::Error;
  int ExitCode() const override { return 3; }
};

class NumericalError : public Error {
 public:
  using Error::Error;
  int ExitCode() const override { return 4; }
};

template <typename... Args>
std::string StrCat(const Args &...args) {
  std::ostringstream os;
  (os << ... << args);
  return os.str();
}

inline void CheckDim(std::int64_t got, std::int64_t expected,
                     const char *what) {
  if (got != expected)
    throw DataError(StrCat(what, ": dimension mismatch (got ", got,
                           ", expected ", expected, ")"));
}

// splitmix64 finalizer; used to derive independent stream seeds from a run
// seed plus integer tags.
inline std::uint64_t MixSeed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t DeriveSeed(std::uint64_t base, std::uint64_t tag) {
  return MixSeed(MixSeed(base) ^ (tag * 0xd1b54a32d192ed03ULL));
}

inline std::uint64_t DeriveSeed(std::uint64_t base, std::uint64_t tag1,
                                std::uint64_t tag2) {
  return DeriveSeed(DeriveSeed(base, tag1), tag2);
}

using Rng = std::mt19937_64;

}  // namespace ddnn

#endif  // DDNN_COMMON_H_
