// include/lrc/synth.h

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

// Synthetic lip-reading corpora.
//
// Each phoneme belongs to a ground-truth cluster; every frame of that phoneme
// draws its descriptor from an isotropic Gaussian around the cluster mean.
// Cluster means lie on a sphere whose radius makes the closest pair exactly
// `separation` apart.  Sentences are drawn from a level-banded pool, phonemes
// are expanded to frames by a uniform duration law, and participant records
// carry per-sentence word accuracies for the cohort statistics.

#ifndef LRC_SYNTH_H_
#define LRC_SYNTH_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "lrc/common.h"
#include "lrc/corpus.h"

namespace lrc {

// Words per sentence at levels 1-4.
constexpr std::array<std::array<int, 2>, 4> kLevelBands{{{3, 4}, {5, 6}, {7, 8}, {8, 12}}};

struct DurationLaw {
  int min = 3;
  int max = 15;
};

struct SynthConfig {
  std::uint64_t seed = 1;
  // "separable" (one cluster per phoneme) or "coincident" (visually
  // indistinguishable phonemes share a cluster).  Ignored when `groups` is set.
  std::string grouping = "separable";
  // Optional explicit cluster per phoneme, 32 entries.
  std::vector<int> groups;
  int feature_dim = 16;
  double spread = 1.0;
  double separation = 4.0;
  DurationLaw consonant{3, 15};
  DurationLaw vowel{6, 20};
  DurationLaw silence{5, 15};
  // Chance of a silence between two words.
  double pause_probability = 0.25;
  int pool_size = 500;
  int sentences_per_speaker = 25;
  std::array<int, 4> level_counts{6, 6, 6, 7};
  int speakers = 4;
  // The last `test_speakers` speakers form the test split.
  int test_speakers = 1;
  int lexicon_size = 100;
  int hearing_impaired = 9;
  int normal_hearing = 15;
  int repetitions = 3;
  // Writes mouth videos and landmarks whose DCT carries a second descriptor
  // stream, so the feature stage exercises ROI normalization and the DCT.
  bool render_video = false;
  int roi_size = 32;
  int video_margin = 8;
  double video_scale = 0.02;

  // Cluster index of every phoneme after applying `grouping`.
  std::vector<int> ResolvedGroups() const;
  void Validate() const;
};

void to_json(nlohmann::json &j, const SynthConfig &c);
void from_json(const nlohmann::json &j, SynthConfig &c);

/// Phoneme clusters of the "coincident" preset: {p,b,m} {t,d} {k,g} {tS,jj}
/// {f} {B} {T,D} {s,z} {x,G} {n,N,J} {l,L} {r,4} {j} {w}, each vowel alone,
/// and silence.  Twenty clusters.
std::vector<int> CoincidentGroups();

/// Prefix-free lexicon of CV-syllable words covering every non-silence
/// phoneme.  Because every word starts with a consonant and ends with a vowel
/// and no word is a prefix of another, a noiseless phoneme string has exactly
/// one segmentation into words.
Lexicon GenLexicon(const SynthConfig &config);

/// Cluster means, one row per cluster.
Matrix ClusterMeans(const SynthConfig &config, int clusters, std::uint64_t stream);

/// Per-frame descriptors for a label sequence.
Matrix SampleFeatures(std::span<const PhonemeId> labels, std::span<const int> groups,
                      const Matrix &means, double spread, Rng &rng);

/// Participant records with per-sentence accuracies for every repetition.
std::vector<Participant> GenParticipants(const SynthConfig &config);

/// Generates a complete corpus below `dir` (manifest.json, lexicon.txt,
/// labels/, features/, and video/ when rendering) and returns the loaded
/// dataset.  Identical configs produce byte-identical directories.
Dataset GenCorpus(const SynthConfig &config, const std::filesystem::path &dir,
                  int jobs = 1);

}  // namespace lrc

#endif  // LRC_SYNTH_H_
