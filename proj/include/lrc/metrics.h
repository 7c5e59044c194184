// include/lrc/metrics.h

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

// Word and frame-level phoneme recognition rates, per-phoneme detection
// counts, participant averages and cumulative curves.

#ifndef LRC_METRICS_H_
#define LRC_METRICS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lrc/corpus.h"

namespace lrc {

struct WordAlignment {
  std::size_t matches = 0;
  std::size_t substitutions = 0;
  std::size_t insertions = 0;
  std::size_t deletions = 0;
  std::size_t Errors() const { return substitutions + insertions + deletions; }
};

/// Levenshtein alignment with unit costs; among minimum-cost alignments the
/// one with the most matches is reported.
WordAlignment AlignWords(std::span<const std::string> reference,
                         std::span<const std::string> hypothesis);

/// Matched words over reference length.  Throws on an empty reference.
double WordRecognitionRate(std::span<const std::string> reference,
                           std::span<const std::string> hypothesis);

/// Fraction of frames carrying the correct phoneme.
double FramePhonemeRate(std::span<const PhonemeId> truth,
                        std::span<const PhonemeId> predicted);

struct PhonemeCounts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  // Absent when the denominator is zero.
  std::optional<double> precision;
  std::optional<double> recall;
};

/// Accumulates per-phoneme detection counts over many utterances.
class PhonemeTally {
 public:
  explicit PhonemeTally(int classes = PhonemeAlphabet::kSize) : counts_(classes) {}
  void Add(std::span<const PhonemeId> truth, std::span<const PhonemeId> predicted);
  void Merge(const PhonemeTally &other);
  /// Counts with precision/recall filled in.
  std::vector<PhonemeCounts> Finish() const;

 private:
  std::vector<PhonemeCounts> counts_;
};

std::vector<PhonemeCounts> PhonemePrf(std::span<const PhonemeId> truth,
                                      std::span<const PhonemeId> predicted,
                                      int classes = PhonemeAlphabet::kSize);

/// Mean sentence word rate of a participant at repetition 1..3.
double ParticipantWordAccuracy(const Participant &participant, int repetition);

double Mean(std::span<const double> values);

/// out[i] = mean(values[0..i]).
std::vector<double> CumulativeCurve(std::span<const double> values);

}  // namespace lrc

#endif  // LRC_METRICS_H_
