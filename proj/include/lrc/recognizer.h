// include/lrc/recognizer.h

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

// Trained recognizer (viseme map + LDA bank + phoneme HMM), its training
// entry point, per-utterance decoding and the binary model container.
//
// Model file layout (little-endian):
//   "LRCM"  u32 version
//   str model fingerprint, str feature fingerprint, str viseme-map fingerprint
//   u32 C (phonemes), u32 V (visemes), u32 D (feature dimension)
//   C x u32 viseme assignment, u32 merge count, merge count x (u32, u32)
//   f64 lambda, V*D x f64 directions, V x f64 bias
//   f64 alpha, C x f64 initial, C*C x f64 transitions, C*V x f64 emissions
//   "END."
// where str is a u32 byte length followed by the bytes.

#ifndef LRC_RECOGNIZER_H_
#define LRC_RECOGNIZER_H_

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lrc/corpus.h"
#include "lrc/hmm.h"
#include "lrc/lda.h"
#include "lrc/viseme-map.h"

namespace lrc {

struct RecognizerModel {
  std::string fingerprint;
  std::string features_fingerprint;
  VisemeMap visemes;
  LdaBank lda;
  HmmModel hmm;

  bool operator==(const RecognizerModel &o) const {
    return fingerprint == o.fingerprint &&
           features_fingerprint == o.features_fingerprint &&
           visemes == o.visemes && lda == o.lda && hmm == o.hmm;
  }
};

struct TrainOptions {
  std::optional<double> lambda;  // default ridge rule when unset
  double alpha = 1.0;
};

struct TrainingUtterance {
  const Matrix *features = nullptr;
  const std::vector<PhonemeId> *labels = nullptr;
};

/// Trains the LDA bank on all training frames, classifies the same frames to
/// estimate the HMM emission table, and counts transitions from the labels.
RecognizerModel TrainRecognizer(std::span<const TrainingUtterance> training,
                                const VisemeMap &visemes,
                                const TrainOptions &options);

struct DecodedUtterance {
  std::vector<PhonemeId> phonemes;
  Matrix viseme_scores;  // frames x V
  std::vector<std::string> words;
  double log_prob = 0.0;
};

DecodedUtterance Decode(const RecognizerModel &model, const Matrix &features,
                        const Lexicon &lexicon);

std::string EncodeModel(const RecognizerModel &model);
RecognizerModel DecodeModel(std::string_view bytes, const std::string &name);
void WriteModel(const std::filesystem::path &path, const RecognizerModel &model);
RecognizerModel ReadModel(const std::filesystem::path &path);

}  // namespace lrc

#endif  // LRC_RECOGNIZER_H_
