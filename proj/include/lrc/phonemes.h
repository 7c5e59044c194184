// include/lrc/phonemes.h

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

#ifndef LRC_PHONEMES_H_
#define LRC_PHONEMES_H_

#include <array>
#include <optional>
#include <string_view>

namespace lrc {

using PhonemeId = int;

/// The Spanish SAMPA inventory (31 symbols) followed by silence.  Indices are
/// stable: they appear in label files, viseme maps and model files.
class PhonemeAlphabet {
 public:
  static constexpr int kSize = 32;
  static constexpr PhonemeId kSilence = 31;

  static constexpr std::array<std::string_view, kSize> kSymbols = {
      "p", "b", "t", "d", "k", "g", "tS", "jj", "f", "B", "T",
      "D", "s", "z", "x", "G", "m", "n", "N", "J", "l", "L",
      "r", "4", "j", "w", "a", "e", "i", "o", "u", "sil"};

  static std::string_view Symbol(PhonemeId id) { return kSymbols.at(id); }
  static std::optional<PhonemeId> Find(std::string_view symbol);
  static bool IsVowel(PhonemeId id) { return id >= 26 && id <= 30; }
  static bool IsSilence(PhonemeId id) { return id == kSilence; }
};

}  // namespace lrc

#endif  // LRC_PHONEMES_H_
