// include/lrc/lda.h

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

#ifndef LRC_LDA_H_
#define LRC_LDA_H_

#include <optional>
#include <span>
#include <vector>

#include "lrc/common.h"
#include "lrc/viseme-map.h"

namespace lrc {

/// Bank of one-vs-rest Fisher discriminants, one per viseme.
///
/// All discriminants share the pooled within-class covariance S_w of the
/// training frames.  For viseme v the direction is
///
///   w_v  =  (S_w + lambda I)^-1 (mu_v - mu_rest)
///
/// rescaled to unit variance under S_w + lambda I, and the bias places the
/// zero crossing halfway between the projected class means.  Frame scores are
/// the softmax of the V projections.
struct LdaBank {
  Matrix directions;  // V x D
  std::vector<double> bias;
  double lambda = 0.0;

  int visemes() const { return static_cast<int>(directions.rows); }
  int dim() const { return static_cast<int>(directions.cols); }

  std::vector<double> Projections(std::span<const double> feature) const;
  /// Probability vector over visemes.
  std::vector<double> Scores(std::span<const double> feature) const;
  /// Argmax of Scores, lowest index on ties.
  int Classify(std::span<const double> feature) const;
  /// Scores for every row; result is frames x V.
  Matrix ScoreFrames(const Matrix &features) const;

  bool operator==(const LdaBank &) const = default;
};

/// Trains a bank over `classes` labels.  Without an explicit lambda the ridge
/// is 1e-3 * trace(S_w) / D, or 1e-3 * trace(S_total) / D when S_w vanishes.
/// lambda = 0 with a singular S_w is an error.
LdaBank TrainLdaBank(const Matrix &features, std::span<const int> labels,
                     int classes, std::optional<double> lambda = std::nullopt);

/// Phoneme-labelled frames, grouped through `map` into visemes.
LdaBank TrainLdaBank(const Matrix &features, std::span<const int> phoneme_labels,
                     const VisemeMap &map,
                     std::optional<double> lambda = std::nullopt);

/// Frame classifier for BuildVisemeMap backed by an LDA bank.
FrameClassifierTrainer MakeLdaTrainer(std::optional<double> lambda = std::nullopt);

}  // namespace lrc

#endif  // LRC_LDA_H_
