// src/oracle.cc

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

#include "lrc/oracle.h"

#include <cmath>
#include <limits>
#include <numeric>

namespace lrc {

OracleResult BruteForceViterbi(const HmmModel &hmm, const Matrix &scores) {
  const std::size_t s = hmm.transitions.rows, t_len = scores.rows;
  if (s == 0 || t_len == 0) throw Error("oracle: empty instance");
  if (scores.cols != hmm.emissions.cols) throw Error("oracle: dimension mismatch");
  std::uint64_t total = 1;
  for (std::size_t t = 0; t < t_len; ++t) {
    total *= s;
    if (total > 1000000) throw Error("oracle: instance too large (S^T > 1e6)");
  }

  // log b(p, o_t), recomputed here from the tables.
  std::vector<double> logb(t_len * s);
  for (std::size_t t = 0; t < t_len; ++t)
    for (std::size_t p = 0; p < s; ++p) {
      double b = 0.0;
      for (std::size_t v = 0; v < scores.cols; ++v)
        b += hmm.emissions(p, v) * scores(t, v);
      logb[t * s + p] = std::log(b < 1e-10 ? 1e-10 : b);
    }

  OracleResult best;
  best.enumerated = total;
  best.log_prob = -std::numeric_limits<double>::infinity();
  std::vector<int> path(t_len, 0);
  // Paths are visited in lexicographic order; only a strict improvement
  // replaces the incumbent, so the smallest argmax survives.
  for (std::uint64_t k = 0; k < total; ++k) {
    std::uint64_t code = k;
    for (std::size_t t = t_len; t-- > 0;) {
      path[t] = static_cast<int>(code % s);
      code /= s;
    }
    double lp = std::log(hmm.initial[path[0]]) + logb[path[0]];
    for (std::size_t t = 1; t < t_len; ++t)
      lp += std::log(hmm.transitions(path[t - 1], path[t])) + logb[t * s + path[t]];
    if (lp > best.log_prob || best.path.empty()) {
      best.log_prob = lp;
      best.path = path;
    }
  }
  return best;
}

std::vector<double> ClosedFormLda2Class(const Matrix &x, std::span<const int> labels) {
  const std::size_t n = x.rows, d = x.cols;
  if (labels.size() != n) throw Error("oracle: label count mismatch");
  std::vector<double> mu[2] = {std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
  std::size_t count[2] = {0, 0};
  for (std::size_t i = 0; i < n; ++i) {
    const int y = labels[i];
    if (y != 0 && y != 1) throw Error("oracle: labels must be 0 or 1");
    ++count[y];
    for (std::size_t c = 0; c < d; ++c) mu[y][c] += x(i, c);
  }
  if (count[0] == 0 || count[1] == 0) throw Error("oracle: empty class");
  for (int y = 0; y < 2; ++y)
    for (double &m : mu[y]) m /= static_cast<double>(count[y]);

  // Augmented [S_w | I], reduced to [I | S_w^-1].
  const std::size_t w = 2 * d;
  std::vector<double> a(d * w, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const int y = labels[i];
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = 0; c < d; ++c)
        a[r * w + c] += (x(i, r) - mu[y][r]) * (x(i, c) - mu[y][c]) / static_cast<double>(n);
  }
  double scale = 0.0;
  for (std::size_t r = 0; r < d; ++r) {
    a[r * w + d + r] = 1.0;
    scale = std::max(scale, std::abs(a[r * w + r]));
  }
  for (std::size_t col = 0; col < d; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < d; ++r)
      if (std::abs(a[r * w + col]) > std::abs(a[piv * w + col])) piv = r;
    if (std::abs(a[piv * w + col]) <= 1e-12 * (scale > 0 ? scale : 1.0))
      throw Error("oracle: singular within-class scatter");
    if (piv != col)
      for (std::size_t c = 0; c < w; ++c) std::swap(a[col * w + c], a[piv * w + c]);
    const double p = a[col * w + col];
    for (std::size_t c = 0; c < w; ++c) a[col * w + c] /= p;
    for (std::size_t r = 0; r < d; ++r) {
      if (r == col) continue;
      const double f = a[r * w + col];
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < w; ++c) a[r * w + c] -= f * a[col * w + c];
    }
  }
  std::vector<double> dir(d, 0.0);
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c) dir[r] += a[r * w + d + c] * (mu[0][c] - mu[1][c]);
  return dir;
}

namespace {

double MeanDiff(std::span<const double> pooled, const std::vector<bool> &in_x,
                std::size_t nx) {
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < pooled.size(); ++i) (in_x[i] ? sx : sy) += pooled[i];
  return sx / static_cast<double>(nx) - sy / static_cast<double>(pooled.size() - nx);
}

// Relative slack so that splits with the observed statistic count as ties.
bool AtLeast(double stat, double observed) {
  return stat >= observed - 1e-12 * (1.0 + std::abs(observed));
}

}  // namespace

double PermutationPValue(std::span<const double> x, std::span<const double> y,
                         int iterations, std::uint64_t seed) {
  if (x.empty() || y.empty()) throw Error("permutation test: empty group");
  if (iterations < 1000) throw Error("permutation test: iterations must be >= 1000");
  std::vector<double> pooled(x.begin(), x.end());
  pooled.insert(pooled.end(), y.begin(), y.end());
  std::vector<bool> in_x(pooled.size(), false);
  std::fill(in_x.begin(), in_x.begin() + static_cast<std::ptrdiff_t>(x.size()), true);
  const double observed = MeanDiff(pooled, in_x, x.size());
  Rng rng(seed);
  std::int64_t hits = 0;
  std::vector<std::size_t> idx(pooled.size());
  for (int it = 0; it < iterations; ++it) {
    std::iota(idx.begin(), idx.end(), 0);
    rng.Shuffle(idx);
    std::fill(in_x.begin(), in_x.end(), false);
    for (std::size_t k = 0; k < x.size(); ++k) in_x[idx[k]] = true;
    hits += AtLeast(MeanDiff(pooled, in_x, x.size()), observed);
  }
  return (1.0 + static_cast<double>(hits)) / (1.0 + iterations);
}

double ExactPermutationPValue(std::span<const double> x, std::span<const double> y) {
  if (x.empty() || y.empty()) throw Error("permutation test: empty group");
  std::vector<double> pooled(x.begin(), x.end());
  pooled.insert(pooled.end(), y.begin(), y.end());
  const std::size_t n = pooled.size(), k = x.size();
  if (n > 30) throw Error("exact permutation test: pooled sample too large");
  std::vector<bool> in_x(n, false);
  std::fill(in_x.begin(), in_x.begin() + static_cast<std::ptrdiff_t>(k), true);
  const double observed = MeanDiff(pooled, in_x, k);
  // Walk every k-subset as a bit mask in increasing order (Gosper's hack).
  std::uint64_t hits = 0, total = 0;
  const std::uint64_t limit = std::uint64_t{1} << n;
  for (std::uint64_t m = (std::uint64_t{1} << k) - 1; m < limit;) {
    for (std::size_t i = 0; i < n; ++i) in_x[i] = (m >> i) & 1;
    hits += AtLeast(MeanDiff(pooled, in_x, k), observed);
    ++total;
    const std::uint64_t c = m & (~m + 1), r = m + c;
    m = (((r ^ m) >> 2) / c) | r;
  }
  return static_cast<double>(hits) / static_cast<double>(total);
}

}  // namespace lrc
