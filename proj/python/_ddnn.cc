// python/_ddnn.cc

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

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ddnn/config.h"
#include "ddnn/dataset.h"
#include "ddnn/eval.h"
#include "ddnn/features.h"
#include "ddnn/finetune.h"
#include "ddnn/network.h"

namespace py = pybind11;
using namespace ddnn;

namespace {

using Segments = std::vector<std::pair<std::size_t, std::size_t>>;

std::vector<Segment> ToSegments(const Segments &s) {
  std::vector<Segment> out;
  for (const auto &[b, e] : s) out.push_back({b, e});
  return out;
}

Segments FromSegments(const std::vector<Segment> &s) {
  Segments out;
  for (const auto &seg : s) out.emplace_back(seg.begin, seg.end);
  return out;
}

AudioSignal ToSignal(const std::vector<double> &samples, int sample_rate) {
  AudioSignal a;
  a.samples = samples;
  a.sample_rate = sample_rate;
  return a;
}

Vector ToVector(const std::vector<double> &v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// Rows are frames on the Python side.
Vector Scores(const DdnnModel &m, const Matrix &features) {
  if (features.cols() != m.InputDim())
    throw DataError(StrCat("predict: expected ", m.InputDim(), " columns, got ", features.cols()));
  Matrix x = features.transpose();
  if (!m.norm.Empty()) x = NormalizeRows(features, m.norm).transpose();
  return ModelForward(m, x);
}

}  // namespace

PYBIND11_MODULE(_ddnn, m) {
  m.doc() = "Denoising deep network voice activity detection";

  // Registered base first: later translators are tried first.
  auto &error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", error.ptr());
  py::register_exception<DataError>(m, "DataError", error.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", error.ptr());

  m.attr("FEATURE_DIM") = kFeatureDim;
  m.attr("SAMPLE_RATE") = kDefaultSampleRate;

  m.def("feature_layout", [] {
    py::list out;
    for (const auto &b : FeatureLayout())
      out.append(py::dict(py::arg("id") = static_cast<int>(b.id), py::arg("name") = b.name,
                          py::arg("offset") = b.offset, py::arg("dim") = b.dim));
    return out;
  });

  m.def("num_frames",
        [](std::size_t n, int frame_length, int frame_shift) {
          FrameSpec s;
          s.frame_length = frame_length;
          s.frame_shift = frame_shift;
          return NumFrames(n, s);
        },
        py::arg("num_samples"), py::arg("frame_length") = 200, py::arg("frame_shift") = 80);

  m.def("extract_features",
        [](const std::vector<double> &samples, int sample_rate) {
          FeatureExtractor fx(FeatureConfig{}, sample_rate);
          py::gil_scoped_release release;
          return fx.ExtractUtterance(ToSignal(samples, sample_rate));
        },
        py::arg("samples"), py::arg("sample_rate") = kDefaultSampleRate,
        "Raw 273-dim vectors, one row per frame.");

  m.def("fit_norm_stats",
        [](const Matrix &rows) {
          const auto s = FitNormStats(rows);
          return std::make_pair(s.min, s.max);
        },
        py::arg("features"));
  m.def("normalize",
        [](const Matrix &rows, const Vector &lo, const Vector &hi) {
          return NormalizeRows(rows, NormStats{lo, hi});
        },
        py::arg("features"), py::arg("min"), py::arg("max"));

  m.def("synthesize_clean",
        [](double seconds, std::uint64_t seed, double fraction) {
          const auto a = SynthesizeClean(seconds, seed, fraction);
          return std::make_pair(ToVector(a.signal.samples), FromSegments(a.speech));
        },
        py::arg("duration_s"), py::arg("seed"), py::arg("speech_fraction") = 0.6,
        "Returns (samples, speech segments as [begin, end) sample pairs).");
  m.def("generate_noise",
        [](const std::string &type, std::size_t n, std::uint64_t seed) {
          return ToVector(GenerateNoise(ParseNoise(type), n, seed).samples);
        },
        py::arg("noise"), py::arg("num_samples"), py::arg("seed"));
  m.def("frame_labels",
        [](std::size_t n, const Segments &speech) {
          return FrameLabels(n, ToSegments(speech), FrameSpec{});
        },
        py::arg("num_samples"), py::arg("speech"));
  m.def("mix_at_snr",
        [](const std::vector<double> &clean, const Segments &speech,
           const std::vector<double> &noise, double snr_db) {
          const auto r = MixAtSnr({ToSignal(clean, kDefaultSampleRate), ToSegments(speech)},
                                  ToSignal(noise, kDefaultSampleRate), snr_db);
          return std::make_pair(ToVector(r.noisy.signal.samples), ToVector(r.clean.signal.samples));
        },
        py::arg("clean"), py::arg("speech"), py::arg("noise"), py::arg("snr_db"),
        "Returns (noisy, scaled clean reference).");
  m.def("measure_snr",
        [](const std::vector<double> &clean, const Segments &speech,
           const std::vector<double> &noisy) {
          return MeasureSnr({ToSignal(clean, kDefaultSampleRate), ToSegments(speech)},
                            ToSignal(noisy, kDefaultSampleRate));
        },
        py::arg("clean"), py::arg("speech"), py::arg("noisy"));

  m.def("accuracy",
        [](const std::vector<int> &d, const std::vector<int> &l) { return Accuracy(d, l); },
        py::arg("decisions"), py::arg("labels"));

  py::class_<DdnnModel>(m, "Model")
      .def_static("load", &ReadModelFile, py::arg("path"))
      .def("save", [](const DdnnModel &self, const std::string &p) { WriteModelFile(self, p); },
           py::arg("path"))
      .def_property_readonly("layer_widths", &DdnnModel::LayerWidths)
      .def_property_readonly("depth", &DdnnModel::Depth)
      .def_property_readonly("input_dim", &DdnnModel::InputDim)
      .def_property_readonly("has_classifier", [](const DdnnModel &self) { return self.has_classifier; })
      .def_property_readonly("level_tag", [](const DdnnModel &self) { return self.level_tag; })
      .def("scores", &Scores, py::arg("features"),
           "H1 probabilities for raw feature rows (normalized with the stored stats).")
      .def("predict",
           [](const DdnnModel &self, const Matrix &features) {
             const Vector s = Scores(self, features);
             std::vector<int> d(s.size());
             for (Eigen::Index i = 0; i < s.size(); ++i) d[i] = s[i] >= kDecisionThreshold;
             return d;
           },
           py::arg("features"))
      .def("__repr__", [](const DdnnModel &self) {
        std::string w;
        for (int x : self.LayerWidths()) w += (w.empty() ? "" : "-") + std::to_string(x);
        return "<ddnn_vad.Model " + w + ">";
      });

  m.def("default_config", [] { return ConfigToJson(ExperimentConfig{}); });

  m.def("train_cell",
        [](const std::string &noise, double snr_db, int depth, std::uint64_t seed,
           const std::string &method, const std::string &config_json) {
          const auto cfg = ParseConfig(config_json);
          TrainedRun run;
          {
            py::gil_scoped_release release;
            const auto cell = BuildCorpusCell(cfg.synth, noise, snr_db, cfg.features);
            run = TrainAndEvaluate(cell, ParseMethod(method), depth, seed, cfg.pretrain,
                                   cfg.finetune);
          }
          py::list log;
          for (const auto &e : run.log.epochs)
            log.append(py::make_tuple(e.epoch, e.train_loss, e.dev_accuracy));
          return py::dict(py::arg("model") = run.model,
                          py::arg("test_accuracy") = run.test_accuracy,
                          py::arg("dev_accuracy") = run.dev_accuracy,
                          py::arg("clean_trainings") = run.pretrain.clean_trainings,
                          py::arg("log") = log);
        },
        py::arg("noise"), py::arg("snr_db"), py::arg("depth") = 3, py::arg("seed") = 1,
        py::arg("method") = "DDNN", py::arg("config_json") = "{}",
        "Synthesizes one corpus cell, trains and scores one model.");
}
