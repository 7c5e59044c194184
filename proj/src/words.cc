// src/words.cc

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

#include "lrc/words.h"

#include <algorithm>
#include <limits>
#include <map>

namespace lrc {

std::vector<PhonemeId> CollapseFrames(std::span<const PhonemeId> frames) {
  std::vector<PhonemeId> out;
  for (std::size_t t = 0; t < frames.size(); ++t) {
    if (t > 0 && frames[t] == frames[t - 1]) continue;
    if (PhonemeAlphabet::IsSilence(frames[t])) continue;
    out.push_back(frames[t]);
  }
  return out;
}

std::vector<std::string> AssembleWords(std::span<const PhonemeId> frames,
                                       const Lexicon &lexicon) {
  const std::vector<PhonemeId> s = CollapseFrames(frames);
  const std::size_t n = s.size();
  if (n == 0) return {};

  // pronunciation -> first lexicon entry
  std::map<std::vector<PhonemeId>, std::size_t> by_pron;
  std::size_t longest = 0;
  for (std::size_t i = 0; i < lexicon.entries().size(); ++i) {
    const auto &e = lexicon.entries()[i];
    by_pron.emplace(e.pronunciation, i);
    longest = std::max(longest, e.pronunciation.size());
  }

  struct Cell {
    std::size_t unmatched = std::numeric_limits<std::size_t>::max();
    std::size_t words = 0;
    std::size_t from = 0;
    long entry = -1;  // lexicon entry ending here, -1 for a skipped phoneme
    bool Better(std::size_t u, std::size_t w) const {
      return u < unmatched || (u == unmatched && w < words);
    }
  };
  std::vector<Cell> dp(n + 1);
  dp[0].unmatched = 0;
  std::vector<PhonemeId> key;
  for (std::size_t i = 0; i < n; ++i) {
    const Cell &c = dp[i];
    if (dp[i + 1].Better(c.unmatched + 1, c.words))
      dp[i + 1] = {c.unmatched + 1, c.words, i, -1};
    key.clear();
    for (std::size_t j = i; j < n && j - i < longest; ++j) {
      key.push_back(s[j]);
      auto it = by_pron.find(key);
      if (it == by_pron.end()) continue;
      if (dp[j + 1].Better(c.unmatched, c.words + 1))
        dp[j + 1] = {c.unmatched, c.words + 1, i, static_cast<long>(it->second)};
    }
  }
  std::vector<std::string> words;
  for (std::size_t k = n; k > 0; k = dp[k].from)
    if (dp[k].entry >= 0) words.push_back(lexicon.entries()[dp[k].entry].word);
  std::reverse(words.begin(), words.end());
  return words;
}

}  // namespace lrc
