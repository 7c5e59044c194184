// include/lrc/hmm.h

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

// One-state-per-phoneme HMM over viseme observations.
//
// A frame observation is a probability vector o over visemes; the emission
// likelihood of phoneme state p is  b(p, o) = sum_v E[p][v] o[v],  floored at
// kEmissionFloor before taking logs.

#ifndef LRC_HMM_H_
#define LRC_HMM_H_

#include <span>
#include <vector>

#include "lrc/common.h"

namespace lrc {

constexpr double kEmissionFloor = 1e-10;

struct HmmModel {
  Matrix transitions;            // S x S, row-stochastic
  std::vector<double> initial;   // S
  Matrix emissions;              // S x V, row-stochastic
  double alpha = 0.0;

  int states() const { return static_cast<int>(transitions.rows); }
  int visemes() const { return static_cast<int>(emissions.cols); }

  /// Throws unless every table is nonnegative and stochastic within 1e-9.
  void Validate() const;

  bool operator==(const HmmModel &) const = default;
};

/// Add-alpha estimates: A from within-sequence frame bigrams of the phoneme
/// labels, pi from first frames, E from (true phoneme, predicted viseme)
/// co-occurrence.  With alpha = 0, a transition row with no counts becomes a
/// self-loop and any other empty row becomes uniform.
HmmModel TrainHmm(std::span<const std::vector<int>> phoneme_sequences,
                  std::span<const std::vector<int>> predicted_visemes,
                  int states, int visemes, double alpha);

struct ViterbiResult {
  std::vector<int> path;
  double log_prob = 0.0;
};

/// Log emission table: result(t, s) = log max(b(s, o_t), floor).
Matrix LogEmissions(const HmmModel &hmm, const Matrix &frame_scores);

/// Most likely state path for frame scores (frames x V).  O(T S^2).  Ties
/// resolve to the lowest state index, both for the final state and at every
/// backpointer.
ViterbiResult ViterbiDecode(const HmmModel &hmm, const Matrix &frame_scores);

/// Log probability of a given path under the same scoring as ViterbiDecode.
double PathLogProb(const HmmModel &hmm, const Matrix &frame_scores,
                   std::span<const int> path);

}  // namespace lrc

#endif  // LRC_HMM_H_
