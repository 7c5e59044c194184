// src/stats.cc

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

#include "lrc/stats.h"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>
#include <numeric>

#include "lrc/common.h"
#include "lrc/metrics.h"

namespace lrc {

std::string_view TailName(Tail tail) {
  return tail == Tail::kXGreater ? "x-greater" : "y-greater";
}

std::string_view MethodName(TestMethod m) {
  return m == TestMethod::kExact ? "exact" : "normal-approximation";
}

std::vector<double> MidRanks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

namespace {

double UpperNormalTail(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

// Sum over tie groups of t^3 - t.
double TieSum(std::span<const double> values) {
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  double s = 0.0;
  for (std::size_t i = 0; i < v.size();) {
    std::size_t j = i;
    while (j < v.size() && v[j] == v[i]) ++j;
    const double t = static_cast<double>(j - i);
    s += t * t * t - t;
    i = j;
  }
  return s;
}

double Binomial(std::size_t n, std::size_t k) {
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / i;
  return r;
}

// Counts size-k subsets of `ranks2` (doubled midranks) whose sum >= target.
void CountSubsets(std::span<const long> ranks2, std::size_t start, std::size_t k,
                  long sum, long target, std::uint64_t &hits) {
  if (k == 0) {
    hits += sum >= target;
    return;
  }
  for (std::size_t i = start; i + k <= ranks2.size(); ++i)
    CountSubsets(ranks2, i + 1, k - 1, sum + ranks2[i], target, hits);
}

RankSumResult RankSumXGreater(std::span<const double> x, std::span<const double> y,
                              bool force_exact) {
  const std::size_t nx = x.size(), ny = y.size(), n = nx + ny;
  std::vector<double> pooled(x.begin(), x.end());
  pooled.insert(pooled.end(), y.begin(), y.end());
  const std::vector<double> ranks = MidRanks(pooled);
  double rx = 0.0;
  for (std::size_t i = 0; i < nx; ++i) rx += ranks[i];
  RankSumResult res;
  res.u = rx - static_cast<double>(nx * (nx + 1)) / 2.0;

  if (n <= kExactRankSumLimit || force_exact) {
    const double total = Binomial(n, nx);
    if (total > 2e8)
      throw Error("exact rank-sum enumeration too large (" +
                  std::to_string(total) + " assignments)");
    // Doubled midranks are integers, so the tail comparison is exact.
    std::vector<long> ranks2(n);
    for (std::size_t i = 0; i < n; ++i) ranks2[i] = std::lround(2.0 * ranks[i]);
    long observed = 0;
    for (std::size_t i = 0; i < nx; ++i) observed += ranks2[i];
    std::uint64_t hits = 0;
    CountSubsets(ranks2, 0, nx, 0, observed, hits);
    res.p = static_cast<double>(hits) / total;
    res.method = TestMethod::kExact;
    return res;
  }

  const double mean = static_cast<double>(nx) * ny / 2.0;
  const double var = static_cast<double>(nx) * ny / 12.0 *
                     ((n + 1.0) - TieSum(pooled) / (static_cast<double>(n) * (n - 1.0)));
  res.method = TestMethod::kNormalApproximation;
  if (var <= 0.0) {
    res.p = 1.0;
    return res;
  }
  res.p = std::clamp(UpperNormalTail((res.u - mean - 0.5) / std::sqrt(var)), 0.0, 1.0);
  return res;
}

}  // namespace

RankSumResult RankSumTest(std::span<const double> x, std::span<const double> y,
                          Tail tail, bool force_exact) {
  if (x.empty() || y.empty()) throw Error("rank-sum test: empty group");
  if (tail == Tail::kXGreater) return RankSumXGreater(x, y, force_exact);
  RankSumResult r = RankSumXGreater(y, x, force_exact);
  r.u = static_cast<double>(x.size() * y.size()) - r.u;
  return r;
}

SignedRankResult SignedRankTest(std::span<const double> x,
                                std::span<const double> y, Tail tail) {
  if (x.size() != y.size()) throw Error("signed-rank test: unpaired samples");
  std::vector<double> d;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double diff = tail == Tail::kXGreater ? x[i] - y[i] : y[i] - x[i];
    if (diff != 0.0) d.push_back(diff);
  }
  SignedRankResult res;
  res.nonzero = d.size();
  if (d.empty()) return res;
  std::vector<double> mag(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) mag[i] = std::abs(d[i]);
  const std::vector<double> ranks = MidRanks(mag);
  for (std::size_t i = 0; i < d.size(); ++i)
    if (d[i] > 0) res.w_plus += ranks[i];
  const std::size_t n = d.size();

  if (n <= kExactRankSumLimit) {
    std::vector<long> r2(n);
    for (std::size_t i = 0; i < n; ++i) r2[i] = std::lround(2.0 * ranks[i]);
    const long observed = std::lround(2.0 * res.w_plus);
    std::uint64_t hits = 0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
      long s = 0;
      for (std::size_t i = 0; i < n; ++i)
        if (mask >> i & 1) s += r2[i];
      hits += s >= observed;
    }
    res.p = static_cast<double>(hits) / static_cast<double>(std::uint64_t{1} << n);
    res.method = TestMethod::kExact;
  } else {
    const double nn = static_cast<double>(n);
    const double mean = nn * (nn + 1) / 4.0;
    const double var = nn * (nn + 1) * (2 * nn + 1) / 24.0 - TieSum(mag) / 48.0;
    res.method = TestMethod::kNormalApproximation;
    res.p = var > 0 ? UpperNormalTail((res.w_plus - mean - 0.5) / std::sqrt(var)) : 1.0;
  }
  if (tail == Tail::kYGreater) {
    // Report W+ for x - y regardless of the tested direction.
    double total = static_cast<double>(n) * (n + 1) / 2.0;
    res.w_plus = total - res.w_plus;
  }
  return res;
}

TTestResult WelchTTest(std::span<const double> x, std::span<const double> y,
                       Tail tail) {
  if (x.size() < 2 || y.size() < 2)
    throw Error("t test needs at least 2 observations per group");
  auto moments = [](std::span<const double> v) {
    const double m = Mean(v);
    double ss = 0.0;
    for (double a : v) ss += (a - m) * (a - m);
    return std::pair{m, ss / static_cast<double>(v.size() - 1)};
  };
  const auto [mx, vx] = moments(x);
  const auto [my, vy] = moments(y);
  const double nx = static_cast<double>(x.size()), ny = static_cast<double>(y.size());
  const double a = vx / nx, b = vy / ny;
  TTestResult res;
  const double diff = tail == Tail::kXGreater ? mx - my : my - mx;
  if (a + b == 0.0) {
    // Both groups constant.
    res.df = nx + ny - 2.0;
    res.t = diff == 0.0 ? 0.0
                        : std::copysign(std::numeric_limits<double>::infinity(), diff);
    res.p = diff == 0.0 ? 0.5 : (diff > 0.0 ? 0.0 : 1.0);
    if (tail == Tail::kYGreater) res.t = -res.t;
    return res;
  }
  res.t = diff / std::sqrt(a + b);
  res.df = (a + b) * (a + b) / (a * a / (nx - 1.0) + b * b / (ny - 1.0));
  boost::math::students_t dist(res.df);
  res.p = boost::math::cdf(boost::math::complement(dist, res.t));
  if (tail == Tail::kYGreater) res.t = -res.t;
  return res;
}

CohortComparison CompareCohorts(std::span<const Participant> participants,
                                int repetition, bool force_exact) {
  CohortComparison c;
  c.repetition = repetition;
  for (const auto &p : participants) {
    const double acc = ParticipantWordAccuracy(p, repetition);
    (p.cohort == Cohort::kHearingImpaired ? c.hearing_impaired : c.normal_hearing)
        .push_back(acc);
  }
  if (c.hearing_impaired.empty() || c.normal_hearing.empty())
    throw Error("cohort comparison needs both cohorts (have " +
                std::to_string(c.hearing_impaired.size()) + " hearing-impaired, " +
                std::to_string(c.normal_hearing.size()) + " normal-hearing)");
  c.rank_sum = RankSumTest(c.hearing_impaired, c.normal_hearing, Tail::kXGreater,
                           force_exact);
  c.t_test = WelchTTest(c.hearing_impaired, c.normal_hearing, Tail::kXGreater);
  c.rank_sum_significant = c.rank_sum.p < kSignificanceLevel;
  c.t_test_significant = c.t_test.p < kSignificanceLevel;
  return c;
}

}  // namespace lrc
