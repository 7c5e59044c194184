// include/lrc/words.h

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

#ifndef LRC_WORDS_H_
#define LRC_WORDS_H_

#include <span>
#include <string>
#include <vector>

#include "lrc/corpus.h"

namespace lrc {

/// Collapses runs of repeated frame labels, drops silence, and returns the
/// remaining phoneme string.
std::vector<PhonemeId> CollapseFrames(std::span<const PhonemeId> frames);

/// Segments a frame-level phoneme sequence into lexicon words.  The collapsed
/// phoneme string is covered by a dynamic program that minimizes the number of
/// phonemes left outside any word, then the number of words.  Unmatched spans
/// emit nothing; homophones resolve to the earliest lexicon entry.
std::vector<std::string> AssembleWords(std::span<const PhonemeId> frames,
                                       const Lexicon &lexicon);

}  // namespace lrc

#endif  // LRC_WORDS_H_
