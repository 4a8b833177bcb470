// src/eval.cc

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

#include "ddnn/eval.h"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

namespace ddnn {

double Accuracy(std::span<const int> decisions, std::span<const int> labels) {
  if (decisions.empty()) throw DataError("accuracy: no decisions");
  CheckDim(static_cast<std::int64_t>(decisions.size()),
           static_cast<std::int64_t>(labels.size()), "accuracy labels");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < decisions.size(); ++i) hits += (decisions[i] == labels[i]);
  return 100.0 * static_cast<double>(hits) / static_cast<double>(decisions.size());
}

std::string MethodName(Method method) {
  switch (method) {
    case Method::kDdnn: return "DDNN";
    case Method::kDbn: return "DBN";
    case Method::kRandomInit: return "RAND";
  }
  return "?";
}

Method ParseMethod(const std::string &name) {
  if (name == "DDNN" || name == "ddnn") return Method::kDdnn;
  if (name == "DBN" || name == "dbn") return Method::kDbn;
  if (name == "RAND" || name == "rand" || name == "random") return Method::kRandomInit;
  throw ConfigError(StrCat("unknown method '", name, "' (ddnn|dbn|rand)"));
}

double CellResult::Mean() const {
  if (accuracies.empty()) return 0.0;
  double s = 0.0;
  for (double a : accuracies) s += a;
  return s / static_cast<double>(accuracies.size());
}

void EvalReport::Sort() {
  std::stable_sort(cells.begin(), cells.end(),
                   [](const CellResult &a, const CellResult &b) { return a.key < b.key; });
}

const CellResult *EvalReport::Find(const CellKey &key) const {
  for (const auto &c : cells)
    if (c.key == key) return &c;
  return nullptr;
}

std::vector<std::string> EvalReport::Noises() const {
  std::vector<std::string> out;
  for (const auto &c : cells)
    if (std::find(out.begin(), out.end(), c.key.noise) == out.end()) out.push_back(c.key.noise);
  return out;
}

std::vector<double> EvalReport::Snrs() const {
  std::set<double> s;
  for (const auto &c : cells) s.insert(c.key.snr_db);
  return {s.begin(), s.end()};
}

std::vector<std::pair<std::string, int>> EvalReport::Rows() const {
  std::set<std::pair<std::string, int>> s;
  for (const auto &c : cells) s.insert({c.key.method, c.key.depth});
  return {s.begin(), s.end()};
}

std::optional<double> EvalReport::SnrAverage(const std::string &method, int depth,
                                             double snr_db) const {
  double sum = 0.0;
  int n = 0;
  for (const auto &c : cells) {
    if (c.key.method != method || c.key.depth != depth || c.key.snr_db != snr_db) continue;
    if (c.excluded || !c.Ok()) continue;
    sum += c.Mean();
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / n;
}

std::optional<double> EvalReport::OverallAverage(const std::string &method, int depth) const {
  double sum = 0.0;
  int n = 0;
  for (const auto &c : cells) {
    if (c.key.method != method || c.key.depth != depth) continue;
    if (c.excluded || !c.Ok()) continue;
    sum += c.Mean();
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / n;
}

bool DefaultExclusion(const std::string &noise, double snr_db) {
  return noise == "babble" && (snr_db == -5.0 || snr_db == 0.0);
}

TrainedRun TrainAndEvaluate(const CorpusCell &cell, Method method, int depth,
                            std::uint64_t seed, const PretrainConfig &pretrain,
                            const FinetuneConfig &finetune) {
  if (depth < 1 || depth > pretrain.Depth())
    throw ConfigError(StrCat("depth ", depth, " outside configured layer sizes (1..",
                             pretrain.Depth(), ")"));
  PretrainConfig pcfg = pretrain;
  pcfg.layer_sizes.resize(depth);
  pcfg.seed = seed;
  FinetuneConfig fcfg = finetune;
  fcfg.seed = seed;

  const NormStats norm = FitNormStats(cell.train.noisy);
  const Matrix x_train = NormalizeRows(cell.train.noisy, norm).transpose();
  const int dim = static_cast<int>(x_train.rows());

  TrainedRun run;
  switch (method) {
    case Method::kDdnn: {
      const Matrix xt_train = NormalizeRows(cell.train.clean, norm).transpose();
      run.pretrain = RunPretraining(x_train, xt_train, pcfg);
      run.model = AssembleClassifier(run.pretrain, seed, norm);
      break;
    }
    case Method::kDbn:
      run.pretrain = RunDbnPretraining(x_train, pcfg);
      run.model = AssembleClassifier(run.pretrain, seed, norm);
      break;
    case Method::kRandomInit:
      run.model = RandomInitClassifier(dim, pcfg.layer_sizes, seed, norm);
      break;
  }
  const LabeledBatch train{x_train, cell.train.labels};
  const LabeledBatch dev{NormalizeRows(cell.dev.noisy, norm).transpose(), cell.dev.labels};
  run.model = Finetune(std::move(run.model), train, fcfg, &dev, &run.log);
  const Matrix x_test = NormalizeRows(cell.test.noisy, norm).transpose();
  run.test_accuracy = Accuracy(Decisions(PredictBatch(run.model, x_test)), cell.test.labels);
  run.dev_accuracy = Accuracy(Decisions(PredictBatch(run.model, dev.inputs)), dev.labels);
  return run;
}

EvalReport DepthSweep(const std::vector<CorpusCell> &cells, const SweepOptions &options) {
  if (options.depths.empty() || options.seeds.empty() || options.methods.empty())
    throw ConfigError("sweep: depths, seeds and methods must be non-empty");
  EvalReport report;
  for (const auto &cell : cells) {
    for (Method method : options.methods) {
      for (int depth : options.depths) {
        CellResult res;
        res.key = {cell.noise, cell.snr_db, MethodName(method), depth};
        res.excluded = options.exclude && options.exclude(cell.noise, cell.snr_db);
        res.frames = cell.test.NumFrames();
        try {
          for (auto seed : options.seeds) {
            const auto run = TrainAndEvaluate(cell, method, depth, seed, options.pretrain,
                                              options.finetune);
            res.seeds.push_back(seed);
            res.accuracies.push_back(run.test_accuracy);
            if (options.on_run) options.on_run(res.key, seed, run.test_accuracy);
          }
        } catch (const Error &e) {
          res.error = e.what();
        }
        report.cells.push_back(std::move(res));
      }
    }
  }
  report.Sort();
  return report;
}

// --- rendering -------------------------------------------------------------------

namespace {

const char *const kEmptyCell = "\xE2\x80\x94";  // em dash

std::string Fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string SnrLabel(double snr) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%gdB", snr);
  return buf;
}

std::size_t DisplayWidth(const std::string &s) {
  std::size_t w = 0;
  for (unsigned char c : s) w += (c & 0xC0) != 0x80;
  return w;
}

std::string RenderGrid(const std::vector<std::vector<std::string>> &rows) {
  std::vector<std::size_t> width;
  for (const auto &r : rows)
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (width.size() <= i) width.push_back(0);
      width[i] = std::max(width[i], DisplayWidth(r[i]));
    }
  std::string out;
  auto rule = [&] {
    out += '+';
    for (auto w : width) out += std::string(w + 2, '-') + '+';
    out += '\n';
  };
  rule();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out += '|';
    for (std::size_t i = 0; i < rows[r].size(); ++i) {
      const auto &cell = rows[r][i];
      const std::string pad(width[i] - DisplayWidth(cell), ' ');
      out += ' ' + (i == 0 ? cell + pad : pad + cell) + " |";
    }
    out += '\n';
    if (r == 0) rule();
  }
  rule();
  return out;
}

std::string RowName(const std::string &method, int depth) {
  return StrCat(method, "_", depth);
}

std::string Sanitize(std::string s) {
  for (char &c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

std::vector<std::string> SplitOn(const std::string &s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

std::string RenderTables(const EvalReport &report) {
  const auto snrs = report.Snrs();
  const auto rows = report.Rows();
  std::string out;
  for (const auto &noise : report.Noises()) {
    std::vector<std::vector<std::string>> grid;
    std::vector<std::string> header{noise};
    for (double s : snrs) header.push_back(SnrLabel(s));
    grid.push_back(header);
    for (const auto &[method, depth] : rows) {
      std::vector<std::string> line{RowName(method, depth)};
      for (double s : snrs) {
        const auto *c = report.Find({noise, s, method, depth});
        std::string v = c && c->Ok() ? Fixed2(c->Mean()) : kEmptyCell;
        if (c && c->Ok() && c->excluded) v += '*';
        line.push_back(v);
      }
      grid.push_back(line);
    }
    out += RenderGrid(grid) + '\n';
  }
  std::vector<std::vector<std::string>> avg;
  std::vector<std::string> header{"AVR"};
  for (double s : snrs) header.push_back(SnrLabel(s));
  header.push_back("ALL");
  avg.push_back(header);
  for (const auto &[method, depth] : rows) {
    std::vector<std::string> line{RowName(method, depth)};
    for (double s : snrs) {
      const auto a = report.SnrAverage(method, depth, s);
      line.push_back(a ? Fixed2(*a) : kEmptyCell);
    }
    const auto all = report.OverallAverage(method, depth);
    line.push_back(all ? Fixed2(*all) : kEmptyCell);
    avg.push_back(line);
  }
  out += RenderGrid(avg);
  out += "* excluded from averages\n";
  return out;
}

std::string RenderCsv(const EvalReport &report) {
  EvalReport sorted = report;
  sorted.Sort();
  std::string out = "noise,snr_db,method,depth,frames,excluded,mean_accuracy,seeds,accuracies,error\n";
  char buf[64];
  for (const auto &c : sorted.cells) {
    std::string seeds, accs;
    for (std::size_t i = 0; i < c.seeds.size(); ++i) {
      if (i) seeds += ';';
      seeds += std::to_string(c.seeds[i]);
    }
    for (std::size_t i = 0; i < c.accuracies.size(); ++i) {
      if (i) accs += ';';
      std::snprintf(buf, sizeof(buf), "%.17g", c.accuracies[i]);
      accs += buf;
    }
    std::snprintf(buf, sizeof(buf), "%g", c.key.snr_db);
    const std::string snr = buf;
    const std::string mean = c.Ok() ? Fixed2(c.Mean()) : "";
    out += StrCat(Sanitize(c.key.noise), ',', snr, ',', Sanitize(c.key.method), ',',
                  c.key.depth, ',', c.frames, ',', c.excluded ? 1 : 0, ',', mean, ',',
                  seeds, ',', accs, ',', Sanitize(c.error), '\n');
  }
  return out;
}

EvalReport ParseCsv(const std::string &csv) {
  std::istringstream is(csv);
  std::string line;
  if (!std::getline(is, line) || line.rfind("noise,snr_db,method,depth", 0) != 0)
    throw DataError("report CSV: missing header");
  EvalReport report;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = SplitOn(line, ',');
    if (f.size() != 10) throw DataError(StrCat("report CSV line ", lineno, ": expected 10 fields"));
    CellResult c;
    try {
      c.key = {f[0], std::stod(f[1]), f[2], std::stoi(f[3])};
      c.frames = std::stoll(f[4]);
      c.excluded = f[5] == "1";
      if (!f[7].empty())
        for (const auto &s : SplitOn(f[7], ';')) c.seeds.push_back(std::stoull(s));
      if (!f[8].empty())
        for (const auto &s : SplitOn(f[8], ';')) c.accuracies.push_back(std::stod(s));
    } catch (const std::logic_error &) {
      throw DataError(StrCat("report CSV line ", lineno, ": malformed number"));
    }
    c.error = f[9];
    report.cells.push_back(std::move(c));
  }
  report.Sort();
  return report;
}

}  // namespace ddnn
