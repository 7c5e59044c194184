// tools/lrc.cc

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

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "lrc/common.h"
#include "lrc/pipeline.h"

int main(int argc, char *argv[]) {
  const char *usage =
      "Lip-reading recognition pipeline.\n"
      "Commands run in order: synth, features, visememap, train, decode, eval;\n"
      "stats compares the participant cohorts of a corpus.\n";
  CLI::App app(usage, "lrc");
  app.require_subcommand(1, 1);

  std::string config_path, output, manifest;
  int jobs = -1, viseme_count = -1;
  long long seed = -1;
  bool retrain = false, exact = false;
  app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--jobs", jobs, "Worker threads (default: logical cores)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--seed", seed, "Master random seed")->check(CLI::NonNegativeNumber);
  app.add_option("--output", output, "Working directory for all artifacts");
  app.add_option("--manifest", manifest, "Corpus manifest (default: OUTPUT/corpus)");
  app.add_option("--viseme-count", viseme_count, "Target number of visemes")
      ->check(CLI::Range(1, 32));
  app.add_flag("--retrain-each-step", retrain,
               "visememap: retrain the classifier before every merge");
  app.add_flag("--exact-permutation", exact,
               "stats/eval: exact rank-sum enumeration at any sample size");

  for (const char *name : {"synth", "features", "visememap", "train", "decode", "eval", "stats"})
    app.add_subcommand(name)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    return app.exit(e);
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    std::optional<std::filesystem::path> file;
    if (!config_path.empty()) file = config_path;
    lrc::RunConfig cfg =
        lrc::LoadRunConfig(file, [](const std::string &k) { return std::getenv(k.c_str()); });
    if (!output.empty()) cfg.output = output;
    if (!manifest.empty()) cfg.manifest = manifest;
    if (jobs >= 0) cfg.jobs = jobs;
    if (seed >= 0) {
      cfg.seed = static_cast<std::uint64_t>(seed);
      cfg.synth.seed = cfg.seed;
    }
    if (viseme_count > 0) cfg.viseme_count = viseme_count;
    if (retrain) cfg.retrain_each_step = true;
    if (exact) cfg.exact_permutation = true;
    std::cout << lrc::RunCommand(command, cfg) << std::endl;
  } catch (const std::exception &e) {
    std::cerr << "lrc " << command << ": " << e.what() << std::endl;
    return 1;
  }
  return 0;
}
