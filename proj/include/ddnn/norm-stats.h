// include/ddnn/norm-stats.h

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

#ifndef DDNN_NORM_STATS_H_
#define DDNN_NORM_STATS_H_

#include "ddnn/common.h"

namespace ddnn {

// Per-dimension range observed on the training split. Persisted with the
// model so that dev/test/predict inputs are scaled the same way.
struct NormStats {
  Vector min;
  Vector max;

  int Dim() const { return static_cast<int>(min.size()); }
  bool Empty() const { return min.size() == 0; }
};

}  // namespace ddnn

#endif  // DDNN_NORM_STATS_H_
