// tools/ddnn-vad.cc

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

// Command-line front end: synth, extract, pretrain, finetune, eval, predict,
// sweep and defaults.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "ddnn/audio.h"
#include "ddnn/config.h"
#include "ddnn/corpus-io.h"
#include "ddnn/eval.h"
#include "ddnn/features.h"
#include "ddnn/finetune.h"
#include "ddnn/network.h"
#include "ddnn/pretrain.h"

namespace fs = std::filesystem;
using namespace ddnn;

namespace {

// Written next to the destination and renamed into place, so a file at
// `path` is always complete.
class AtomicPath {
 public:
  explicit AtomicPath(std::string path) : path_(std::move(path)), tmp_(path_ + ".part") {}
  ~AtomicPath() {
    std::error_code ec;
    if (!committed_) fs::remove(tmp_, ec);
  }
  const std::string &tmp() const { return tmp_; }
  void Commit() {
    std::error_code ec;
    fs::rename(tmp_, path_, ec);
    if (ec) throw DataError(StrCat("cannot move '", tmp_, "' to '", path_, "': ", ec.message()));
    committed_ = true;
  }

 private:
  std::string path_, tmp_;
  bool committed_ = false;
};

void WriteTextFile(const std::string &path, const std::string &text) {
  AtomicPath out(path);
  {
    std::ofstream os(out.tmp(), std::ios::binary);
    os << text;
    if (!os) throw DataError(StrCat("cannot write '", path, "'"));
  }
  out.Commit();
}

void SaveModel(const DdnnModel &model, const std::string &path) {
  AtomicPath out(path);
  WriteModelFile(model, out.tmp());
  out.Commit();
}

void EnsureParent(const std::string &path) {
  const auto parent = fs::path(path).parent_path();
  if (parent.empty()) return;
  std::error_code ec;
  fs::create_directories(parent, ec);
  if (ec) throw DataError(StrCat("cannot create directory '", parent.string(), "'"));
}

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string noise;
  std::optional<double> snr;
};

ExperimentConfig LoadOrDefault(const Common &c) {
  ExperimentConfig cfg = c.config_path.empty() ? ExperimentConfig{} : LoadConfig(c.config_path);
  if (c.seed) {
    cfg.synth.seed = *c.seed;
    cfg.pretrain.seed = *c.seed;
    cfg.finetune.seed = *c.seed;
  }
  return cfg;
}

Matrix Columns(const Matrix &rows, const NormStats &norm) {
  return NormalizeRows(rows, norm).transpose();
}

// --- commands ----------------------------------------------------------------------

int CmdSynth(const Common &c, const std::string &out) {
  const auto cfg = LoadOrDefault(c);
  const auto manifest = SynthesizeCorpus(cfg.synth, out);
  double worst = 0.0;
  for (const auto &e : manifest.entries)
    worst = std::max(worst, std::abs(e.measured_snr_db - e.snr_db));
  std::fprintf(stderr, "synth: %zu mixtures written to %s (max SNR error %.4f dB)\n",
               manifest.entries.size(), out.c_str(), worst);
  return 0;
}

int CmdExtract(const Common &c, const std::string &manifest_path, const std::string &out) {
  const auto cfg = LoadOrDefault(c);
  const auto manifest = ReadManifest(manifest_path);
  const auto base = fs::path(manifest_path).parent_path().string();
  const auto cells = ExtractCorpus(manifest, base.empty() ? "." : base, cfg.features);
  const std::string tmp = out + ".part";
  std::error_code ec;
  fs::remove_all(tmp, ec);
  WriteFeatureSet(cells, tmp);
  fs::remove_all(out, ec);
  fs::rename(tmp, out, ec);
  if (ec) throw DataError(StrCat("cannot move feature set into '", out, "'"));
  for (const auto &cell : cells)
    std::fprintf(stderr, "extract: %s train %d dev %d test %d frames\n",
                 CellName(cell.noise, cell.snr_db).c_str(), cell.train.NumFrames(),
                 cell.dev.NumFrames(), cell.test.NumFrames());
  return 0;
}

int CmdPretrain(const Common &c, const std::string &features, const std::string &out,
                const std::string &method_name, int depth) {
  auto cfg = LoadOrDefault(c);
  const Method method = ParseMethod(method_name);
  if (depth > 0) {
    if (depth > cfg.pretrain.Depth())
      throw ConfigError(StrCat("--depth ", depth, " exceeds configured layer sizes"));
    cfg.pretrain.layer_sizes.resize(depth);
  }
  const auto cells = ReadFeatureSet(features);
  const auto &cell = SelectCell(cells, c.noise, c.snr.value_or(0.0), c.snr.has_value());
  const NormStats norm = FitNormStats(cell.train.noisy);
  const Matrix x = Columns(cell.train.noisy, norm);
  EnsureParent(out);

  auto checkpoint = [&](const PretrainState &state) {
    DdnnModel m = CheckpointModel(state, cfg.pretrain);
    m.norm = norm;
    SaveModel(m, StrCat(out, ".level", state.CompletedLevels()));
    std::fprintf(stderr, "pretrain: level %d done\n", state.CompletedLevels());
  };

  DdnnModel model;
  PretrainState state;
  switch (method) {
    case Method::kDdnn:
      state = RunPretraining(x, Columns(cell.train.clean, norm), cfg.pretrain, checkpoint);
      break;
    case Method::kDbn:
      state = RunDbnPretraining(x, cfg.pretrain, checkpoint);
      break;
    case Method::kRandomInit:
      break;
  }
  if (method == Method::kRandomInit) {
    model = RandomInitClassifier(static_cast<int>(x.rows()), cfg.pretrain.layer_sizes,
                                 cfg.pretrain.seed, norm);
    model.has_classifier = false;
    model.classifier = LayerParams();
  } else {
    model = CheckpointModel(state, cfg.pretrain);
    model.norm = norm;
  }
  std::string trace = "level,path,epoch,loss\n";
  char buf[128];
  for (const auto &t : state.traces)
    for (std::size_t e = 0; e < t.epoch_loss.size(); ++e) {
      std::snprintf(buf, sizeof(buf), "%d,%s,%zu,%.10f\n", t.level,
                    t.clean_path ? "clean" : "noisy", e + 1, t.epoch_loss[e]);
      trace += buf;
    }
  WriteTextFile(out + ".pretrain.csv", trace);
  SaveModel(model, out);
  std::fprintf(stderr, "pretrain: %s model with %d layers written to %s\n",
               MethodName(method).c_str(), model.Depth(), out.c_str());
  return 0;
}

int CmdFinetune(const Common &c, const std::string &model_path, const std::string &features,
                const std::string &out, std::string log_path) {
  const auto cfg = LoadOrDefault(c);
  DdnnModel model = ReadModelFile(model_path);
  const auto cells = ReadFeatureSet(features);
  const auto &cell = SelectCell(cells, c.noise, c.snr.value_or(0.0), c.snr.has_value());
  CheckDim(cell.train.noisy.cols(), model.InputDim(), "feature width vs model input");
  if (model.norm.Empty()) model.norm = FitNormStats(cell.train.noisy);
  if (!model.has_classifier) model = AttachHead(std::move(model), cfg.finetune.seed);
  const LabeledBatch train{Columns(cell.train.noisy, model.norm), cell.train.labels};
  const LabeledBatch dev{Columns(cell.dev.noisy, model.norm), cell.dev.labels};
  FinetuneLog log;
  model = Finetune(std::move(model), train, cfg.finetune, &dev, &log);
  EnsureParent(out);
  if (log_path.empty()) log_path = out + ".log.csv";
  WriteTextFile(log_path, log.ToCsv());
  SaveModel(model, out);
  const double dev_acc = log.epochs.empty() ? 0.0 : log.epochs.back().dev_accuracy;
  std::fprintf(stderr, "finetune: %zu epochs, final dev accuracy %.2f%%\n", log.epochs.size(),
               dev_acc);
  return 0;
}

int CmdEval(const Common &c, const std::string &model_path, const std::string &features,
            const std::string &report_path, const std::string &method_name) {
  const auto cfg = LoadOrDefault(c);
  const DdnnModel model = ReadModelFile(model_path);
  if (!model.has_classifier) throw ConfigError("eval: model has no classifier head (run finetune)");
  if (model.norm.Empty()) throw DataError("eval: model carries no normalization statistics");
  const auto cells = ReadFeatureSet(features);
  std::vector<const CorpusCell *> chosen;
  if (c.noise.empty() && !c.snr) {
    for (const auto &cell : cells) chosen.push_back(&cell);
  } else {
    chosen.push_back(&SelectCell(cells, c.noise, c.snr.value_or(0.0), c.snr.has_value()));
  }
  EvalReport report;
  for (const CorpusCell *cell : chosen) {
    CheckDim(cell->test.noisy.cols(), model.InputDim(), "feature width vs model input");
    const Matrix x = Columns(cell->test.noisy, model.norm);
    CellResult r;
    r.key = {cell->noise, cell->snr_db, method_name, model.Depth()};
    r.frames = cell->test.NumFrames();
    r.excluded = cfg.exclude_babble_low_snr && DefaultExclusion(cell->noise, cell->snr_db);
    r.seeds.push_back(model.config.seed);
    r.accuracies.push_back(Accuracy(Decisions(PredictBatch(model, x)), cell->test.labels));
    report.cells.push_back(std::move(r));
  }
  report.Sort();
  EnsureParent(report_path);
  const std::string tables = RenderTables(report);
  WriteTextFile(report_path, RenderCsv(report));
  WriteTextFile(report_path + ".txt", tables);
  std::cout << tables;
  return 0;
}

int CmdPredict(const std::string &model_path, const std::string &wav, const std::string &out,
               const std::string &scores_path) {
  const DdnnModel model = ReadModelFile(model_path);
  if (!model.has_classifier) throw ConfigError("predict: model has no classifier head");
  if (model.norm.Empty()) throw DataError("predict: model carries no normalization statistics");
  const AudioSignal signal = ReadWav(wav);
  FeatureExtractor extractor;
  const Matrix feats = extractor.ExtractUtterance(signal);
  CheckDim(feats.cols(), model.InputDim(), "feature width vs model input");
  const auto preds = PredictBatch(model, Columns(feats, model.norm));
  EnsureParent(out);
  {
    AtomicPath tmp(out);
    WriteLabels(Decisions(preds), tmp.tmp());
    tmp.Commit();
  }
  if (!scores_path.empty()) {
    std::string text;
    char buf[64];
    for (const auto &p : preds) {
      std::snprintf(buf, sizeof(buf), "%.9f\n", p.score);
      text += buf;
    }
    WriteTextFile(scores_path, text);
  }
  std::size_t speech = 0;
  for (const auto &p : preds) speech += p.decision;
  std::fprintf(stderr, "predict: %zu frames, %zu speech\n", preds.size(), speech);
  return 0;
}

int CmdSweep(const Common &c, const std::string &features, const std::string &out) {
  const auto cfg = LoadOrDefault(c);
  std::vector<CorpusCell> cells;
  if (!features.empty()) {
    cells = ReadFeatureSet(features);
  } else {
    for (const auto &noise : cfg.synth.noises)
      for (double snr : cfg.synth.snrs_db)
        cells.push_back(BuildCorpusCell(cfg.synth, noise, snr, cfg.features));
  }
  auto options = cfg.Sweep();
  options.on_run = [](const CellKey &k, std::uint64_t seed, double acc) {
    std::fprintf(stderr, "sweep: %s %s_%d seed %llu -> %.2f%%\n",
                 CellName(k.noise, k.snr_db).c_str(), k.method.c_str(), k.depth,
                 static_cast<unsigned long long>(seed), acc);
  };
  const auto report = DepthSweep(cells, options);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw DataError(StrCat("cannot create directory '", out, "'"));
  const std::string tables = RenderTables(report);
  WriteTextFile((fs::path(out) / "report.csv").string(), RenderCsv(report));
  WriteTextFile((fs::path(out) / "report.txt").string(), tables);
  std::cout << tables;
  for (const auto &cell : report.cells)
    if (!cell.error.empty()) return NumericalError("").ExitCode();
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Denoising deep neural network voice activity detector"};
  app.require_subcommand(1);
  Common common;
  std::string out, manifest, features, model, report, wav, log, scores, method = "ddnn";
  int depth = 0;

  auto add_common = [&](CLI::App *cmd, bool selection) {
    cmd->add_option("--config", common.config_path, "JSON configuration file")
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed", common.seed, "Override every seed in the configuration");
    if (selection) {
      cmd->add_option("--noise", common.noise, "Noise condition to use");
      cmd->add_option("--snr", common.snr, "SNR condition to use (dB)");
    }
  };

  auto *synth = app.add_subcommand("synth", "Synthesize a paired noisy/clean corpus");
  add_common(synth, false);
  synth->add_option("--out", out, "Output directory")->required();

  auto *extract = app.add_subcommand("extract", "Extract paired features from a corpus");
  add_common(extract, false);
  extract->add_option("--manifest", manifest, "Corpus manifest.json")->required();
  extract->add_option("--out", out, "Output feature directory")->required();

  auto *pretrain = app.add_subcommand("pretrain", "Greedy layer-wise pretraining");
  add_common(pretrain, true);
  pretrain->add_option("--features", features, "Feature set or cell directory")->required();
  pretrain->add_option("--out", out, "Output model file")->required();
  pretrain->add_option("--method", method, "ddnn | dbn | rand");
  pretrain->add_option("--depth", depth, "Use only the first N configured layers");

  auto *finetune = app.add_subcommand("finetune", "Supervised fine-tuning");
  add_common(finetune, true);
  finetune->add_option("--model", model, "Pretrained model")->required();
  finetune->add_option("--features", features, "Feature set or cell directory")->required();
  finetune->add_option("--out", out, "Output model file")->required();
  finetune->add_option("--log", log, "Training log CSV (default <out>.log.csv)");

  auto *eval = app.add_subcommand("eval", "Frame accuracy on the test split");
  add_common(eval, true);
  eval->add_option("--model", model, "Fine-tuned model")->required();
  eval->add_option("--features", features, "Feature set or cell directory")->required();
  eval->add_option("--report", report, "Report CSV (tables go to <report>.txt)")->required();
  eval->add_option("--method", method, "Row label for the report");

  auto *predict = app.add_subcommand("predict", "Frame decisions for one WAV file");
  predict->add_option("--model", model, "Fine-tuned model")->required();
  predict->add_option("--wav", wav, "16-bit mono 8 kHz WAV")->required();
  predict->add_option("--out", out, "Output labels (one 0/1 per frame)")->required();
  predict->add_option("--scores", scores, "Optional per-frame scores");

  auto *sweep = app.add_subcommand("sweep", "Depth sweep over every condition");
  add_common(sweep, false);
  sweep->add_option("--features", features, "Use an extracted feature set");
  sweep->add_option("--out", out, "Output directory for report.csv/report.txt")->required();

  auto *defaults = app.add_subcommand("defaults", "Print the default configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return ConfigError("").ExitCode();
  }

  try {
    if (*synth) return CmdSynth(common, out);
    if (*extract) return CmdExtract(common, manifest, out);
    if (*pretrain) return CmdPretrain(common, features, out, method, depth);
    if (*finetune) return CmdFinetune(common, model, features, out, log);
    if (*eval) return CmdEval(common, model, features, report, MethodName(ParseMethod(method)));
    if (*predict) return CmdPredict(model, wav, out, scores);
    if (*sweep) return CmdSweep(common, features, out);
    if (*defaults) {
      std::cout << ConfigToJson(ExperimentConfig{});
      return 0;
    }
  } catch (const Error &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.ExitCode();
  } catch (const std::exception &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
