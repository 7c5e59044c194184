// include/lrc/corpus.h

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

// Utterances, per-frame phoneme ground truth, the pronunciation lexicon and
// lip-reading participant records, plus their on-disk formats:
//
//   manifest.json   utterance list, participants, lexicon reference
//   *.lab           "frame_index<TAB>phoneme" per line, indices 0,1,2,...
//   lexicon.txt     "word<TAB>ph ph ph" per line
//
// Lines starting with '#' are comments in both text formats.

#ifndef LRC_CORPUS_H_
#define LRC_CORPUS_H_

#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "lrc/phonemes.h"

namespace lrc {

struct Utterance {
  std::string id;
  std::string speaker_id;
  int level = 1;
  std::vector<std::string> text;
  double frame_rate = 50.0;
  std::vector<PhonemeId> frame_labels;
  // "train" or "test".
  std::string split = "train";

  // Paths as written in the manifest, relative to the manifest directory.
  std::string label_path;
  std::string feature_path;
  // "external" for ingested descriptors, "fused" for extracted features.
  std::string feature_kind = "external";
  std::string video_path;
  std::string landmarks_path;

  bool operator==(const Utterance &) const = default;
};

enum class Cohort { kHearingImpaired, kNormalHearing };

std::string_view CohortName(Cohort c);
Cohort ParseCohort(std::string_view name);

struct Participant {
  std::string id;
  Cohort cohort = Cohort::kNormalHearing;
  // accuracies[r][s]: word rate of sentence s at repetition r+1.  A repetition
  // without data is an empty row.
  std::vector<std::vector<double>> accuracies;
  // Difficulty level of each presented sentence, in presentation order.
  std::vector<int> sentence_levels;

  bool operator==(const Participant &) const = default;
};

class Lexicon {
 public:
  struct Entry {
    std::string word;
    std::vector<PhonemeId> pronunciation;
    bool operator==(const Entry &) const = default;
  };

  void Add(std::string word, std::vector<PhonemeId> pronunciation);
  const Entry *Find(const std::string &word) const;
  const std::vector<Entry> &entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  bool operator==(const Lexicon &o) const { return entries_ == o.entries_; }

 private:
  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

Lexicon ReadLexicon(const std::filesystem::path &path);
std::string FormatLexicon(const Lexicon &lexicon);

std::vector<PhonemeId> ParseLabels(const std::string &contents,
                                   const std::string &source_name);
std::vector<PhonemeId> ReadLabels(const std::filesystem::path &path);
std::string FormatLabels(const std::vector<PhonemeId> &labels);

/// A loaded corpus.  Immutable after loading; safe to share between readers.
struct Dataset {
  std::filesystem::path root;  // directory holding the manifest
  std::string fingerprint;
  std::string lexicon_path;
  Lexicon lexicon;
  std::vector<Utterance> utterances;
  std::vector<Participant> participants;
  // Opaque configuration block carried by downstream manifests (JSON text).
  std::string config_json;

  const Utterance *Find(const std::string &id) const;
  std::filesystem::path Resolve(const std::string &relative) const {
    return root / relative;
  }
  // Rebuilds the id index; call after editing `utterances`.  Throws on
  // duplicate ids.
  void Reindex();

 private:
  std::unordered_map<std::string, std::size_t> index_;
};

/// Loads and validates a manifest; every referenced file must exist and every
/// label must belong to the alphabet.
Dataset LoadManifest(const std::filesystem::path &path);

/// Writes manifest.json, the lexicon and every label file below `dir`, using
/// the relative paths stored in the dataset.  Feature files are not touched.
void SaveDataset(const Dataset &dataset, const std::filesystem::path &dir);

std::string FormatManifest(const Dataset &dataset);

struct AlignmentReport {
  bool ok = false;
  bool empty = false;
  // feature_count - label_count
  long delta = 0;
};

AlignmentReport ValidateAlignment(const Utterance &utterance,
                                  std::size_t feature_count);

struct PhonemeString {
  std::vector<PhonemeId> phonemes;
  // Start offset of each word inside `phonemes`.
  std::vector<std::size_t> word_starts;
};

PhonemeString WordsToPhonemes(const std::vector<std::string> &text,
                              const Lexicon &lexicon);

struct Interval {
  double start = 0.0;
  double end = 0.0;
  std::string symbol;  // empty means silence
};

/// Per-frame labels from an interval tier: frame i takes the label of the
/// interval containing its midpoint (i + 0.5) / frame_rate, or silence.
std::vector<PhonemeId> IntervalsToFrameLabels(
    const std::vector<Interval> &intervals, double frame_rate,
    std::optional<std::size_t> frame_count = std::nullopt);

/// Reads the first interval tier of a Praat TextGrid (long text format), or a
/// "start<TAB>end<TAB>phoneme" table.
std::vector<Interval> ReadIntervals(const std::filesystem::path &path);
std::vector<Interval> ParseTextGrid(const std::string &contents);

}  // namespace lrc

#endif  // LRC_CORPUS_H_
