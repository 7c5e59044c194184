// include/lrc/pipeline.h

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

// Pipeline stages behind the command-line tool.  Every stage reads its inputs
// from and writes its artifacts to the working directory (RunConfig::output):
//
//   corpus/manifest.json     synth            (or an external --manifest)
//   features/manifest.json   features         standardized, fused frames
//   visemes.tsv              visememap
//   model.bin                train
//   decode.json              decode
//   report.json, plots/      eval
//   stats.json, plots/       stats
//
// Each artifact records its own fingerprint and the fingerprint of the
// artifact it was derived from; a stage refuses inputs whose fingerprints do
// not chain.

#ifndef LRC_PIPELINE_H_
#define LRC_PIPELINE_H_

#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include "json.hpp"
#include "lrc/features.h"
#include "lrc/synth.h"

namespace lrc {

struct RunConfig {
  std::filesystem::path output = "lrc-out";
  // Corpus manifest; empty means <output>/corpus/manifest.json.
  std::string manifest;
  int jobs = 0;  // 0: one worker per logical core
  std::uint64_t seed = 1;
  SynthConfig synth;
  RoiConfig roi;
  int dct_k = 64;
  int window = 3;
  int viseme_count = 20;
  double holdout = 0.2;
  bool retrain_each_step = false;
  std::optional<double> lambda;
  double alpha = 1.0;
  bool exact_permutation = false;
  // Utterances to decode: "test", "train" or "all".
  std::string decode_split = "test";

  int Jobs() const;
  void Validate() const;
  std::filesystem::path CorpusManifest() const;
  std::filesystem::path FeaturesDir() const { return output / "features"; }
  std::filesystem::path VisemeMapPath() const { return output / "visemes.tsv"; }
  std::filesystem::path ModelPath() const { return output / "model.bin"; }
  std::filesystem::path DecodePath() const { return output / "decode.json"; }
  std::filesystem::path ReportPath() const { return output / "report.json"; }
  std::filesystem::path StatsPath() const { return output / "stats.json"; }
  std::filesystem::path PlotsDir() const { return output / "plots"; }
};

nlohmann::json RunConfigToJson(const RunConfig &config);
RunConfig RunConfigFromJson(const nlohmann::json &j);

using EnvLookup = std::function<const char *(const std::string &)>;

/// Defaults, then the optional config file, then LRC_* variables.  A leaf
/// key path such as synth.spread is overridden by LRC_SYNTH_SPREAD; values
/// are parsed as JSON, falling back to a plain string.
RunConfig LoadRunConfig(const std::optional<std::filesystem::path> &file,
                        const EnvLookup &env);

/// Runs one stage and returns its one-line summary.
std::string RunSynth(const RunConfig &config);
std::string RunFeatures(const RunConfig &config);
std::string RunVisemeMap(const RunConfig &config);
std::string RunTrain(const RunConfig &config);
std::string RunDecode(const RunConfig &config);
std::string RunEval(const RunConfig &config);
std::string RunStats(const RunConfig &config);

/// Dispatches on synth, features, visememap, train, decode, eval, stats.
std::string RunCommand(const std::string &command, const RunConfig &config);

}  // namespace lrc

#endif  // LRC_PIPELINE_H_
