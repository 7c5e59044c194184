// src/viseme-map.cc

// Copyright 2026  The lrc Authors
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

#include "lrc/viseme-map.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lrc/phonemes.h"

namespace lrc {

std::int64_t ConfusionMatrix::RowTotal(int truth) const {
  std::int64_t s = 0;
  for (int j = 0; j < classes_; ++j) s += at(truth, j);
  return s;
}

std::int64_t ConfusionMatrix::Total() const {
  std::int64_t s = 0;
  for (auto c : counts_) s += c;
  return s;
}

void ConfusionMatrix::Add(const ConfusionMatrix &other) {
  if (other.classes_ != classes_) throw Error("confusion matrix size mismatch");
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
}

ConfusionMatrix ComputeConfusion(std::span<const int> truth,
                                 std::span<const int> predicted, int classes) {
  if (truth.size() != predicted.size())
    throw Error("confusion: length mismatch (" + std::to_string(truth.size()) +
                " true vs " + std::to_string(predicted.size()) + " predicted)");
  ConfusionMatrix m(classes);
  for (std::size_t t = 0; t < truth.size(); ++t) {
    if (truth[t] < 0 || truth[t] >= classes || predicted[t] < 0 ||
        predicted[t] >= classes)
      throw Error("confusion: label out of range at frame " + std::to_string(t));
    ++m.at(truth[t], predicted[t]);
  }
  return m;
}

double AmbiguityScore(const ConfusionMatrix &m, int i, int j) {
  double score = 0.0;
  if (auto ri = m.RowTotal(i); ri > 0)
    score += static_cast<double>(m.at(i, j)) / static_cast<double>(ri);
  if (auto rj = m.RowTotal(j); rj > 0)
    score += static_cast<double>(m.at(j, i)) / static_cast<double>(rj);
  return score;
}

ConfusionMatrix MergeClasses(const ConfusionMatrix &m, std::pair<int, int> pair) {
  const auto [a, b] = pair;
  const int c = m.classes();
  if (!(0 <= a && a < b && b < c)) throw Error("invalid merge pair");
  // old index -> new index
  auto remap = [a, b](int k) { return k == b ? a : (k > b ? k - 1 : k); };
  ConfusionMatrix out(c - 1);
  for (int i = 0; i < c; ++i)
    for (int j = 0; j < c; ++j) out.at(remap(i), remap(j)) += m.at(i, j);
  return out;
}

MergeResult MergeStep(const ConfusionMatrix &m) {
  const int c = m.classes();
  if (c < 2) throw Error("merge step needs at least 2 classes, have " +
                         std::to_string(c));
  std::vector<std::int64_t> rows(c);
  for (int i = 0; i < c; ++i) rows[i] = m.RowTotal(i);
  double best = -1.0;
  std::pair<int, int> pair{0, 1};
  for (int i = 0; i < c; ++i)
    for (int j = i + 1; j < c; ++j) {
      double s = 0.0;
      if (rows[i] > 0) s += static_cast<double>(m.at(i, j)) / static_cast<double>(rows[i]);
      if (rows[j] > 0) s += static_cast<double>(m.at(j, i)) / static_cast<double>(rows[j]);
      if (s > best) {
        best = s;
        pair = {i, j};
      }
    }
  return {MergeClasses(m, pair), pair};
}

VisemeMap VisemeMap::Identity(int classes) {
  VisemeMap m;
  m.assignment.resize(classes);
  for (int i = 0; i < classes; ++i) m.assignment[i] = i;
  m.viseme_count = classes;
  return m;
}

VisemeMap VisemeMap::Replay(int classes,
                            std::span<const std::pair<int, int>> history) {
  std::vector<std::vector<int>> groups(classes);
  for (int i = 0; i < classes; ++i) groups[i] = {i};
  for (auto [a, b] : history) {
    if (!(0 <= a && a < b && b < static_cast<int>(groups.size())))
      throw Error("invalid merge (" + std::to_string(a) + ", " +
                  std::to_string(b) + ") in history");
    groups[a].insert(groups[a].end(), groups[b].begin(), groups[b].end());
    groups.erase(groups.begin() + b);
  }
  VisemeMap m;
  m.assignment.assign(classes, -1);
  for (std::size_t v = 0; v < groups.size(); ++v)
    for (int p : groups[v]) m.assignment[p] = static_cast<int>(v);
  m.viseme_count = static_cast<int>(groups.size());
  m.history.assign(history.begin(), history.end());
  return m;
}

std::vector<std::vector<int>> VisemeMap::Groups() const {
  std::vector<std::vector<int>> g(viseme_count);
  for (std::size_t p = 0; p < assignment.size(); ++p)
    g[assignment[p]].push_back(static_cast<int>(p));
  return g;
}

VisemeMap MergeToCount(const ConfusionMatrix &confusion, int target) {
  const int c = confusion.classes();
  if (target < 1 || target > c)
    throw Error("viseme count " + std::to_string(target) + " outside [1, " +
                std::to_string(c) + "]");
  std::vector<std::pair<int, int>> history;
  ConfusionMatrix m = confusion;
  while (m.classes() > target) {
    MergeResult r = MergeStep(m);
    history.push_back(r.pair);
    m = std::move(r.merged);
  }
  return VisemeMap::Replay(c, history);
}

namespace {

std::vector<int> Relabel(std::span<const int> labels, const VisemeMap &map) {
  std::vector<int> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) out[i] = map.assignment[labels[i]];
  return out;
}

struct Stacked {
  Matrix x;
  std::vector<int> y;
};

Stacked Stack(std::span<const LabeledSequence> seqs,
              std::span<const std::size_t> which) {
  Stacked s;
  std::size_t rows = 0, cols = 0;
  for (std::size_t k : which) {
    rows += seqs[k].features.rows;
    cols = seqs[k].features.cols;
  }
  s.x = Matrix(rows, cols);
  s.y.reserve(rows);
  std::size_t r = 0;
  for (std::size_t k : which) {
    const auto &seq = seqs[k];
    if (seq.features.rows != seq.labels.size())
      throw Error("labels and features differ in length");
    if (seq.features.cols != cols) throw Error("inconsistent feature dimension");
    std::copy(seq.features.data.begin(), seq.features.data.end(),
              s.x.data.begin() + static_cast<std::ptrdiff_t>(r * cols));
    s.y.insert(s.y.end(), seq.labels.begin(), seq.labels.end());
    r += seq.features.rows;
  }
  return s;
}

}  // namespace

VisemeMap BuildVisemeMap(std::span<const LabeledSequence> training,
                         const FrameClassifierTrainer &trainer,
                         const VisemeMapOptions &options) {
  const int classes = options.classes;
  if (options.target < 1 || options.target > classes)
    throw Error("viseme count " + std::to_string(options.target) +
                " outside [1, " + std::to_string(classes) + "]");
  if (options.target == classes) return VisemeMap::Identity(classes);
  if (training.size() < 2)
    throw Error("insufficient data: need at least 2 training utterances to "
                "hold out a confusion split");

  std::vector<std::size_t> order(training.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(DeriveSeed(options.seed, 0x7669736d));
  rng.Shuffle(order);
  std::size_t held = static_cast<std::size_t>(
      std::lround(options.holdout_fraction * static_cast<double>(order.size())));
  held = std::clamp<std::size_t>(held, 1, order.size() - 1);
  std::vector<std::size_t> eval_idx(order.begin(), order.begin() + held);
  std::vector<std::size_t> fit_idx(order.begin() + held, order.end());
  std::sort(eval_idx.begin(), eval_idx.end());
  std::sort(fit_idx.begin(), fit_idx.end());

  const Stacked fit = Stack(training, fit_idx);
  const Stacked eval = Stack(training, eval_idx);
  std::vector<std::int64_t> per_class(classes, 0);
  for (int y : fit.y) {
    if (y < 0 || y >= classes) throw Error("label out of range in training data");
    ++per_class[y];
  }
  for (int p = 0; p < classes; ++p)
    if (per_class[p] == 0)
      throw Error("insufficient data: class " + std::to_string(p) + " (" +
                  std::string(p < PhonemeAlphabet::kSize
                                  ? PhonemeAlphabet::Symbol(p)
                                  : "?") +
                  ") has no training frames");

  if (!options.retrain_each_step) {
    std::vector<int> pred = trainer(fit.x, fit.y, classes, eval.x);
    return MergeToCount(ComputeConfusion(eval.y, pred, classes), options.target);
  }

  std::vector<std::pair<int, int>> history;
  VisemeMap current = VisemeMap::Identity(classes);
  while (current.viseme_count > options.target) {
    const auto fit_y = Relabel(fit.y, current);
    const auto eval_y = Relabel(eval.y, current);
    std::vector<int> pred = trainer(fit.x, fit_y, current.viseme_count, eval.x);
    MergeResult r = MergeStep(ComputeConfusion(eval_y, pred, current.viseme_count));
    history.push_back(r.pair);
    current = VisemeMap::Replay(classes, history);
  }
  return current;
}

std::string FormatVisemeMap(const VisemeMap &map) {
  std::ostringstream os;
  os << "# lrc viseme map: " << map.classes() << " phonemes, "
     << map.viseme_count << " visemes\n";
  if (!map.fingerprint.empty()) os << "# fingerprint\t" << map.fingerprint << "\n";
  if (!map.source_fingerprint.empty())
    os << "# source\t" << map.source_fingerprint << "\n";
  for (int p = 0; p < map.classes(); ++p)
    os << PhonemeAlphabet::Symbol(p) << '\t' << map.assignment[p] << '\n';
  for (auto [a, b] : map.history) os << "merge\t" << a << '\t' << b << '\n';
  return os.str();
}

VisemeMap ParseVisemeMap(const std::string &contents, const std::string &name) {
  std::istringstream is(contents);
  std::string line, fingerprint, source;
  std::vector<int> assignment(PhonemeAlphabet::kSize, -1);
  std::vector<std::pair<int, int>> history;
  std::size_t n = 0;
  auto fail = [&](const std::string &why) {
    throw Error("viseme map " + name + ":" + std::to_string(n) + ": " + why);
  };
  auto to_int = [&](const std::string &s) {
    try {
      std::size_t used = 0;
      int v = std::stoi(s, &used);
      if (used != s.size()) fail("bad integer '" + s + "'");
      return v;
    } catch (const std::logic_error &) {
      fail("bad integer '" + s + "'");
    }
    return 0;
  };
  while (std::getline(is, line)) {
    ++n;
    auto f = SplitWhitespace(line);
    if (f.empty()) continue;
    if (f[0] == "#") {
      if (f.size() == 3 && f[1] == "fingerprint") fingerprint = f[2];
      if (f.size() == 3 && f[1] == "source") source = f[2];
      continue;
    }
    if (f[0][0] == '#') continue;
    if (f[0] == "merge") {
      if (f.size() != 3) fail("malformed merge record");
      history.emplace_back(to_int(f[1]), to_int(f[2]));
      continue;
    }
    if (f.size() != 2) fail("malformed record");
    auto p = PhonemeAlphabet::Find(f[0]);
    if (!p) fail("unknown phoneme '" + f[0] + "'");
    if (assignment[*p] != -1) fail("duplicate phoneme '" + f[0] + "'");
    assignment[*p] = to_int(f[1]);
  }
  for (int p = 0; p < PhonemeAlphabet::kSize; ++p)
    if (assignment[p] < 0)
      throw Error("viseme map " + name + " lacks phoneme '" +
                  std::string(PhonemeAlphabet::Symbol(p)) + "'");
  VisemeMap map = VisemeMap::Replay(PhonemeAlphabet::kSize, history);
  if (map.assignment != assignment)
    throw Error("viseme map " + name +
                ": assignment does not match its merge history");
  map.fingerprint = fingerprint;
  map.source_fingerprint = source;
  return map;
}

}  // namespace lrc
