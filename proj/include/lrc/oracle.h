// include/lrc/oracle.h

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

// Slow reference implementations used to check the decoder, the LDA bank and
// the rank tests.  Nothing here calls into hmm.cc, lda.cc or stats.cc.

#ifndef LRC_ORACLE_H_
#define LRC_ORACLE_H_

#include <cstdint>
#include <span>
#include <vector>

#include "lrc/common.h"
#include "lrc/hmm.h"

namespace lrc {

struct OracleResult {
  std::vector<int> path;
  double log_prob = 0.0;
  std::uint64_t enumerated = 0;  // S^T
};

/// Scores every state path; returns the best log probability and the
/// lexicographically smallest path reaching it.  Requires S^T <= 1e6.
OracleResult BruteForceViterbi(const HmmModel &hmm, const Matrix &frame_scores);

/// (S_w)^-1 (mu_0 - mu_1) for labels in {0, 1}, S_w the pooled within-class
/// covariance, inverted by Gauss-Jordan elimination with partial pivoting.
std::vector<double> ClosedFormLda2Class(const Matrix &features,
                                        std::span<const int> labels);

/// Monte Carlo permutation p-value of mean(x) - mean(y) (x greater), with
/// the plus-one correction: (1 + #{perm stat >= observed}) / (1 + iterations).
double PermutationPValue(std::span<const double> x, std::span<const double> y,
                         int iterations, std::uint64_t seed);

/// Same statistic, exact over every split of the pooled sample.
double ExactPermutationPValue(std::span<const double> x, std::span<const double> y);

}  // namespace lrc

#endif  // LRC_ORACLE_H_
