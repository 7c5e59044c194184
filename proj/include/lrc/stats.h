// include/lrc/stats.h

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

// One-sided two-sample tests used for the cohort comparison.
//
// The rank-sum test is Mann-Whitney U on pooled midranks.  Up to a combined
// sample size of kExactRankSumLimit the null distribution is enumerated over
// every assignment of the pooled ranks to the groups; above it a normal
// approximation with tie correction and a 0.5 continuity correction is used
// unless the exact path is forced.  The paired signed-rank test is offered
// for data that carry an explicit pairing.

#ifndef LRC_STATS_H_
#define LRC_STATS_H_

#include <span>
#include <string>
#include <vector>

#include "lrc/corpus.h"

namespace lrc {

enum class Tail {
  kXGreater,  // alternative: x tends to be larger than y
  kYGreater,
};

std::string_view TailName(Tail tail);

enum class TestMethod { kExact, kNormalApproximation };

std::string_view MethodName(TestMethod m);

constexpr std::size_t kExactRankSumLimit = 20;
constexpr double kSignificanceLevel = 0.05;

/// Midranks (1-based) of `values`; ties share their average rank.
std::vector<double> MidRanks(std::span<const double> values);

struct RankSumResult {
  double u = 0.0;  // U statistic of group x
  double p = 1.0;
  TestMethod method = TestMethod::kExact;
};

RankSumResult RankSumTest(std::span<const double> x, std::span<const double> y,
                          Tail tail, bool force_exact = false);

struct SignedRankResult {
  double w_plus = 0.0;  // rank sum of positive differences x - y
  std::size_t nonzero = 0;
  double p = 1.0;
  TestMethod method = TestMethod::kExact;
};

/// Wilcoxon signed-rank test on pairs (x[i], y[i]); zero differences dropped.
SignedRankResult SignedRankTest(std::span<const double> x,
                                std::span<const double> y, Tail tail);

struct TTestResult {
  double t = 0.0;
  double df = 0.0;
  double p = 0.5;
};

/// Welch two-sample t test with Welch-Satterthwaite degrees of freedom.
TTestResult WelchTTest(std::span<const double> x, std::span<const double> y,
                       Tail tail);

struct CohortComparison {
  int repetition = 1;
  // Participant word accuracies; x = hearing-impaired, y = normal-hearing.
  std::vector<double> hearing_impaired;
  std::vector<double> normal_hearing;
  RankSumResult rank_sum;
  TTestResult t_test;
  bool rank_sum_significant = false;
  bool t_test_significant = false;
};

/// One-sided comparison (hearing-impaired greater) of participant word
/// accuracies at `repetition`.
CohortComparison CompareCohorts(std::span<const Participant> participants,
                                int repetition, bool force_exact = false);

}  // namespace lrc

#endif  // LRC_STATS_H_
