// include/lrc/viseme-map.h

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

// Phoneme-to-viseme mapping by greedy merging of the most confusable classes.
//
// The ambiguity of classes i and j is the symmetrized row-normalized
// confusion  m[i][j] / row_i + m[j][i] / row_j  (empty rows contribute 0).
// Each merge step folds the most ambiguous pair (lowest (i, j) on ties) into
// one class: row j is added to row i, column j to column i, and index j is
// removed, so class indices above j shift down by one.  The merge history is
// recorded in the index space current at each step.

#ifndef LRC_VISEME_MAP_H_
#define LRC_VISEME_MAP_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lrc/common.h"

namespace lrc {

class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(int classes = 0)
      : classes_(classes),
        counts_(static_cast<std::size_t>(classes) * classes, 0) {}

  int classes() const { return classes_; }
  std::int64_t &at(int truth, int predicted) {
    return counts_[static_cast<std::size_t>(truth) * classes_ + predicted];
  }
  std::int64_t at(int truth, int predicted) const {
    return counts_[static_cast<std::size_t>(truth) * classes_ + predicted];
  }
  std::int64_t RowTotal(int truth) const;
  std::int64_t Total() const;
  void Add(const ConfusionMatrix &other);

  bool operator==(const ConfusionMatrix &) const = default;

 private:
  int classes_;
  std::vector<std::int64_t> counts_;
};

ConfusionMatrix ComputeConfusion(std::span<const int> truth,
                                 std::span<const int> predicted, int classes);

double AmbiguityScore(const ConfusionMatrix &m, int i, int j);

struct MergeResult {
  ConfusionMatrix merged;
  std::pair<int, int> pair;  // first < second
};

MergeResult MergeStep(const ConfusionMatrix &m);

/// Merges classes `pair.first` and `pair.second` (first < second).
ConfusionMatrix MergeClasses(const ConfusionMatrix &m, std::pair<int, int> pair);

struct VisemeMap {
  // assignment[phoneme] = viseme index
  std::vector<int> assignment;
  int viseme_count = 0;
  std::vector<std::pair<int, int>> history;
  std::string fingerprint;
  // Fingerprint of the features the map was built from.
  std::string source_fingerprint;

  static VisemeMap Identity(int classes);
  /// Applies `history` to the identity map over `classes` phonemes.  Visemes
  /// are numbered by their smallest member phoneme.
  static VisemeMap Replay(int classes, std::span<const std::pair<int, int>> history);

  std::vector<std::vector<int>> Groups() const;
  int classes() const { return static_cast<int>(assignment.size()); }

  bool operator==(const VisemeMap &o) const {
    return assignment == o.assignment && viseme_count == o.viseme_count &&
           history == o.history;
  }
};

/// Greedy merging of a phoneme confusion matrix down to `target` classes,
/// aggregating the matrix between steps without retraining.
VisemeMap MergeToCount(const ConfusionMatrix &confusion, int target);

/// Frame classifier used while building the map: trains on (features,
/// labels in [0, classes)) and returns hard predictions for `eval`.
using FrameClassifierTrainer = std::function<std::vector<int>(
    const Matrix &train, std::span<const int> train_labels, int classes,
    const Matrix &eval)>;

struct LabeledSequence {
  Matrix features;
  std::vector<int> labels;
};

struct VisemeMapOptions {
  int target = 20;
  std::uint64_t seed = 1;
  double holdout_fraction = 0.2;
  // Retrain the classifier on the merged classes before every merge instead of
  // aggregating the held-out confusion matrix.
  bool retrain_each_step = false;
  int classes = 32;
};

/// Splits the training utterances into a fit part and a held-out part
/// (seeded, by utterance), trains the classifier on the fit part, and merges
/// on the held-out frame confusion until `options.target` classes remain.
VisemeMap BuildVisemeMap(std::span<const LabeledSequence> training,
                         const FrameClassifierTrainer &trainer,
                         const VisemeMapOptions &options);

// Text format: "phoneme<TAB>viseme" per phoneme, then "merge<TAB>i<TAB>j" per
// step, "#" comments; "# fingerprint<TAB>hex" carries the fingerprint and
// "# source<TAB>hex" the fingerprint of the features it was built from.
std::string FormatVisemeMap(const VisemeMap &map);
VisemeMap ParseVisemeMap(const std::string &contents, const std::string &name);

}  // namespace lrc

#endif  // LRC_VISEME_MAP_H_
