# python/ddnn_vad/__init__.py

# Copyright 2026  The DDNN-VAD Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#  http://www.apache.org/licenses/LICENSE-2.0
#
# THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
# KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
# WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
# MERCHANTABLITY OR NON-INFRINGEMENT.
# See the Apache 2 License for the specific language governing permissions and
# limitations under the License.

"""Denoising deep network voice activity detection."""

from ._ddnn import (
    FEATURE_DIM,
    SAMPLE_RATE,
    ConfigError,
    DataError,
    Error,
    Model,
    NumericalError,
    accuracy,
    default_config,
    extract_features,
    feature_layout,
    fit_norm_stats,
    frame_labels,
    generate_noise,
    measure_snr,
    mix_at_snr,
    normalize,
    num_frames,
    synthesize_clean,
    train_cell,
)

__all__ = [
    "FEATURE_DIM",
    "SAMPLE_RATE",
    "ConfigError",
    "DataError",
    "Error",
    "Model",
    "NumericalError",
    "accuracy",
    "default_config",
    "extract_features",
    "feature_layout",
    "fit_norm_stats",
    "frame_labels",
    "generate_noise",
    "measure_snr",
    "mix_at_snr",
    "normalize",
    "num_frames",
    "synthesize_clean",
    "train_cell",
]
__version__ = "0.1.0"
