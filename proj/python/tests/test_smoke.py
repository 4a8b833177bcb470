# python/tests/test_smoke.py

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

import json

import numpy as np
import pytest

import ddnn_vad


def test_feature_layout_sums_to_273():
    layout = ddnn_vad.feature_layout()
    assert [b["dim"] for b in layout] == [1, 16, 16, 16, 20, 20, 20, 12, 17, 135]
    assert sum(b["dim"] for b in layout) == ddnn_vad.FEATURE_DIM == 273
    assert layout[-1]["offset"] + layout[-1]["dim"] == 273


def test_framing():
    assert ddnn_vad.num_frames(8000) == 98
    assert ddnn_vad.num_frames(200) == 1
    assert ddnn_vad.num_frames(199) == 0


def test_synthesis_mixing_and_snr():
    clean, speech = ddnn_vad.synthesize_clean(3.0, seed=4)
    assert clean.shape == (24000,)
    assert speech and all(b < e for b, e in speech)
    labels = ddnn_vad.frame_labels(len(clean), speech)
    assert len(labels) == ddnn_vad.num_frames(len(clean))
    assert 0 < sum(labels) < len(labels)
    noise = ddnn_vad.generate_noise("pink", len(clean), seed=2)
    for snr in (-5.0, 0.0, 5.0, 10.0):
        noisy, ref = ddnn_vad.mix_at_snr(clean, speech, noise, snr)
        assert abs(ddnn_vad.measure_snr(ref, speech, noisy) - snr) < 0.1
        # Independent numpy recomputation.
        mask = np.zeros(len(ref), dtype=bool)
        for b, e in speech:
            mask[b:e] = True
        ps = np.mean(ref[mask] ** 2)
        pn = np.mean((noisy - ref) ** 2)
        assert abs(10 * np.log10(ps / pn) - snr) < 1e-6


def test_features_and_normalization():
    clean, _ = ddnn_vad.synthesize_clean(1.0, seed=1)
    feats = ddnn_vad.extract_features(clean)
    assert feats.shape == (98, 273)
    assert np.isfinite(feats).all()
    lo, hi = ddnn_vad.fit_norm_stats(feats)
    norm = ddnn_vad.normalize(feats, lo, hi)
    assert norm.min() >= 0.0 and norm.max() <= 1.0


def test_errors_map_to_python_exceptions():
    with pytest.raises(ddnn_vad.ConfigError):
        ddnn_vad.generate_noise("car", 10, seed=1)
    with pytest.raises(ddnn_vad.DataError):
        ddnn_vad.accuracy([], [])
    with pytest.raises(ddnn_vad.DataError):
        ddnn_vad.Model.load("/nonexistent/model.bin")
    assert issubclass(ddnn_vad.DataError, ddnn_vad.Error)
    assert ddnn_vad.accuracy([1, 0, 1, 1], [1, 1, 1, 1]) == 75.0


def test_train_save_load_predict(tmp_path):
    cfg = json.loads(ddnn_vad.default_config())
    assert cfg["pretrain"]["layer_sizes"] == [54, 7, 7]
    small = {
        "synth": {"num_utterances": 5, "utterance_seconds": 2.0},
        "pretrain": {"max_epochs": 3},
        "finetune": {"max_epochs": 3},
    }
    run = ddnn_vad.train_cell("white", 10.0, depth=2, seed=3, config_json=json.dumps(small))
    model = run["model"]
    assert model.layer_widths == [273, 54, 7, 1]
    assert run["clean_trainings"] == 1
    assert 0.0 <= run["test_accuracy"] <= 100.0
    assert len(run["log"]) == 3

    path = tmp_path / "model.bin"
    model.save(str(path))
    again = ddnn_vad.Model.load(str(path))
    assert again.layer_widths == model.layer_widths

    clean, _ = ddnn_vad.synthesize_clean(1.0, seed=9)
    feats = ddnn_vad.extract_features(clean)
    scores = again.scores(feats)
    assert scores.shape == (98,)
    assert ((scores > 0) & (scores < 1)).all()
    assert again.predict(feats) == [int(s >= 0.5) for s in scores]
    with pytest.raises(ddnn_vad.DataError):
        again.scores(feats[:, :10])
