// src/metrics.cc

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

#include "lrc/metrics.h"

#include "lrc/common.h"

namespace lrc {

WordAlignment AlignWords(std::span<const std::string> ref,
                         std::span<const std::string> hyp) {
  const std::size_t n = ref.size(), m = hyp.size();
  // Lowest cost wins; equal cost prefers more matches.
  struct Cell {
    std::size_t cost = 0;
    std::size_t matches = 0;
    char op = ' ';  // 'M'atch, 'S'ub, 'I'nsertion, 'D'eletion
  };
  auto better = [](std::size_t c, std::size_t mt, const Cell &cur) {
    return c < cur.cost || (c == cur.cost && mt > cur.matches);
  };
  std::vector<Cell> dp((n + 1) * (m + 1));
  auto at = [&](std::size_t i, std::size_t j) -> Cell & { return dp[i * (m + 1) + j]; };
  for (std::size_t i = 1; i <= n; ++i) at(i, 0) = {i, 0, 'D'};
  for (std::size_t j = 1; j <= m; ++j) at(0, j) = {j, 0, 'I'};
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= m; ++j) {
      const Cell &diag = at(i - 1, j - 1);
      Cell best;
      if (ref[i - 1] == hyp[j - 1])
        best = {diag.cost, diag.matches + 1, 'M'};
      else
        best = {diag.cost + 1, diag.matches, 'S'};
      const Cell &up = at(i - 1, j);
      if (better(up.cost + 1, up.matches, best)) best = {up.cost + 1, up.matches, 'D'};
      const Cell &left = at(i, j - 1);
      if (better(left.cost + 1, left.matches, best))
        best = {left.cost + 1, left.matches, 'I'};
      at(i, j) = best;
    }
  WordAlignment a;
  for (std::size_t i = n, j = m; i > 0 || j > 0;) {
    switch (at(i, j).op) {
      case 'M': ++a.matches; --i; --j; break;
      case 'S': ++a.substitutions; --i; --j; break;
      case 'D': ++a.deletions; --i; break;
      default: ++a.insertions; --j; break;
    }
  }
  return a;
}

double WordRecognitionRate(std::span<const std::string> reference,
                           std::span<const std::string> hypothesis) {
  if (reference.empty()) throw Error("word rate: empty reference");
  return static_cast<double>(AlignWords(reference, hypothesis).matches) /
         static_cast<double>(reference.size());
}

double FramePhonemeRate(std::span<const PhonemeId> truth,
                        std::span<const PhonemeId> predicted) {
  if (truth.size() != predicted.size())
    throw Error("phoneme rate: length mismatch (" + std::to_string(truth.size()) +
                " vs " + std::to_string(predicted.size()) + " frames)");
  if (truth.empty()) throw Error("phoneme rate: no frames");
  std::size_t hit = 0;
  for (std::size_t t = 0; t < truth.size(); ++t) hit += truth[t] == predicted[t];
  return static_cast<double>(hit) / static_cast<double>(truth.size());
}

void PhonemeTally::Add(std::span<const PhonemeId> truth,
                       std::span<const PhonemeId> predicted) {
  if (truth.size() != predicted.size())
    throw Error("phoneme counts: length mismatch");
  const int c = static_cast<int>(counts_.size());
  for (std::size_t t = 0; t < truth.size(); ++t) {
    const int a = truth[t], b = predicted[t];
    if (a < 0 || a >= c || b < 0 || b >= c)
      throw Error("phoneme counts: label out of range");
    if (a == b) {
      ++counts_[a].tp;
    } else {
      ++counts_[b].fp;
      ++counts_[a].fn;
    }
  }
}

void PhonemeTally::Merge(const PhonemeTally &other) {
  if (other.counts_.size() != counts_.size())
    throw Error("phoneme counts: class count mismatch");
  for (std::size_t p = 0; p < counts_.size(); ++p) {
    counts_[p].tp += other.counts_[p].tp;
    counts_[p].fp += other.counts_[p].fp;
    counts_[p].fn += other.counts_[p].fn;
  }
}

std::vector<PhonemeCounts> PhonemeTally::Finish() const {
  std::vector<PhonemeCounts> out = counts_;
  for (auto &c : out) {
    if (c.tp + c.fp > 0) c.precision = static_cast<double>(c.tp) / (c.tp + c.fp);
    if (c.tp + c.fn > 0) c.recall = static_cast<double>(c.tp) / (c.tp + c.fn);
  }
  return out;
}

std::vector<PhonemeCounts> PhonemePrf(std::span<const PhonemeId> truth,
                                      std::span<const PhonemeId> predicted,
                                      int classes) {
  PhonemeTally tally(classes);
  tally.Add(truth, predicted);
  return tally.Finish();
}

double ParticipantWordAccuracy(const Participant &p, int repetition) {
  if (repetition < 1 || repetition > 3)
    throw Error("repetition must be 1-3, got " + std::to_string(repetition));
  if (static_cast<std::size_t>(repetition) > p.accuracies.size() ||
      p.accuracies[repetition - 1].empty())
    throw Error("participant '" + p.id + "' has no data for repetition " +
                std::to_string(repetition));
  return Mean(p.accuracies[repetition - 1]);
}

double Mean(std::span<const double> values) {
  if (values.empty()) throw Error("mean of an empty sample");
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

std::vector<double> CumulativeCurve(std::span<const double> values) {
  if (values.empty()) throw Error("cumulative curve of an empty sequence");
  std::vector<double> out(values.size());
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    s += values[i];
    out[i] = s / static_cast<double>(i + 1);
  }
  return out;
}

}  // namespace lrc
