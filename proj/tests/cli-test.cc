// tests/cli-test.cc

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <map>

#include "json.hpp"
#include "lrc/pipeline.h"
#include "test-util.h"

using namespace lrc;
using lrc::testing::TempDir;
using nlohmann::json;

namespace {

const char *NoEnv(const std::string &) { return nullptr; }

RunConfig BaseConfig(const std::filesystem::path &out) {
  RunConfig c = LoadRunConfig(std::nullopt, NoEnv);
  c.output = out;
  c.jobs = 2;
  return c;
}

void RunAll(const RunConfig &c) {
  for (const char *cmd : {"synth", "features", "visememap", "train", "decode", "eval", "stats"})
    CHECK(RunCommand(cmd, c).rfind(cmd, 0) == 0);
}

json Load(const std::filesystem::path &p) { return json::parse(ReadFile(p)); }

struct Shell {
  int status;
  std::string out, err;
};

Shell Run(const TempDir &dir, const std::string &args) {
  const auto out = dir / "stdout.txt", err = dir / "stderr.txt";
  const std::string cmd = std::string(LRC_CLI_PATH) + " " + args + " >" + out.string() +
                          " 2>" + err.string();
  const int rc = std::system(cmd.c_str());
  return {WIFEXITED(rc) ? WEXITSTATUS(rc) : -1, ReadFile(out), ReadFile(err)};
}

}  // namespace

TEST_CASE("full pipeline writes every report table") {
  TempDir dir("cli");
  const RunConfig c = BaseConfig(dir / "run");
  RunAll(c);
  const json report = Load(c.ReportPath());
  for (const char *key : {"summary", "utterances", "speakers", "levels", "cumulative",
                          "phonemes", "tests", "fingerprint", "config"})
    CHECK(report.contains(key));
  CHECK(report["utterances"].size() == 25);
  CHECK(report["levels"].size() == 4);
  CHECK(report["phonemes"].size() == 32);
  CHECK(report["tests"].size() == 3);
  const double w = report["summary"]["word_rate"], f = report["summary"]["frame_phoneme_rate"];
  CHECK((w >= 0.0 && w <= 1.0));
  CHECK((f >= 0.0 && f <= 1.0));
  const json stats = Load(c.StatsPath());
  CHECK(stats["participants"].size() == 24);
  CHECK(stats["tests"].size() == 3);
  for (const char *t : {"system_speakers.tsv", "system_levels.tsv", "system_cumulative.tsv",
                        "phonemes.tsv", "human_participants.tsv", "human_cohorts.tsv",
                        "human_levels.tsv", "human_cumulative.tsv"})
    CHECK(std::filesystem::exists(c.PlotsDir() / t));
  CHECK(ReadFile(c.PlotsDir() / "phonemes.tsv").rfind("phoneme\ttp\tfp\tfn", 0) == 0);
  const auto map = ReadFile(c.VisemeMapPath());
  CHECK(map.find("merge\t") != std::string::npos);
}

TEST_CASE("a noiseless corpus decodes every word") {
  TempDir dir("cli");
  RunConfig c = BaseConfig(dir / "clean");
  c.synth.spread = 0.0;
  c.viseme_count = 32;
  RunAll(c);
  const json report = Load(c.ReportPath());
  CHECK(report["summary"]["word_rate"].get<double>() == 1.0);
  CHECK(report["summary"]["frame_phoneme_rate"].get<double>() > 0.99);
}

TEST_CASE("stages refuse artifacts from a different configuration") {
  TempDir dir("cli");
  RunConfig c = BaseConfig(dir / "fp");
  RunAll(c);
  const std::string old_map = ReadFile(c.VisemeMapPath());
  c.window = 5;
  RunFeatures(c);
  CHECK_THROWS_WITH_AS(RunDecode(c), doctest::Contains("fingerprint mismatch"), Error);
  CHECK_THROWS_WITH_AS(RunTrain(c), doctest::Contains("fingerprint mismatch"), Error);
  CHECK_THROWS_WITH_AS(RunEval(c), doctest::Contains("fingerprint mismatch"), Error);
  RunVisemeMap(c);
  CHECK(ReadFile(c.VisemeMapPath()) != old_map);
  CHECK_NOTHROW(RunTrain(c));
  CHECK_NOTHROW(RunDecode(c));
  CHECK_NOTHROW(RunEval(c));
}

TEST_CASE("reruns are byte-identical") {
  TempDir dir("cli");
  RunConfig a = BaseConfig(dir / "a"), b = BaseConfig(dir / "b");
  b.jobs = 1;
  RunAll(a);
  RunAll(b);
  for (const char *f : {"visemes.tsv", "model.bin", "decode.json", "report.json",
                        "stats.json", "features/manifest.json", "plots/phonemes.tsv"})
    CHECK_MESSAGE(ReadFile(dir / "a" / f) == ReadFile(dir / "b" / f), f);
  // Same directory, second run.
  RunCommand("eval", a);
  CHECK(ReadFile(a.ReportPath()) == ReadFile(b.ReportPath()));
}

TEST_CASE("configuration layering") {
  TempDir dir("cli");
  const std::map<std::string, std::string> env = {{"LRC_SYNTH_GROUPING", "coincident"},
                                                  {"LRC_VISEME_COUNT", "12"},
                                                  {"LRC_LAMBDA", "0.5"},
                                                  {"LRC_OUTPUT", "from-env"}};
  auto lookup = [&](const std::string &k) -> const char * {
    const auto it = env.find(k);
    return it == env.end() ? nullptr : it->second.c_str();
  };
  WriteFileAtomic(dir / "cfg.json", R"({"viseme_count": 8, "alpha": 2.0,
                                        "synth": {"spread": 0.5}})");
  const RunConfig c = LoadRunConfig(dir / "cfg.json", lookup);
  CHECK(c.synth.grouping == "coincident");
  CHECK(c.viseme_count == 12);
  CHECK(c.alpha == 2.0);
  CHECK(c.synth.spread == 0.5);
  CHECK(c.lambda == 0.5);
  CHECK(c.output == "from-env");
  const RunConfig d = LoadRunConfig(std::nullopt, NoEnv);
  CHECK(d.viseme_count == 20);
  CHECK(d.window == 3);
  CHECK(RunConfigFromJson(RunConfigToJson(c)).viseme_count == 12);

  WriteFileAtomic(dir / "bad.json", R"({"visemes": 8})");
  CHECK_THROWS_WITH_AS(LoadRunConfig(dir / "bad.json", NoEnv), doctest::Contains("unknown"),
                       Error);
  auto too_many = [](const std::string &k) -> const char * {
    return k == "LRC_VISEME_COUNT" ? "40" : nullptr;
  };
  CHECK_THROWS_AS(LoadRunConfig(std::nullopt, too_many), Error);
}

TEST_CASE("video corpora go through ROI normalization and the DCT") {
  TempDir dir("cli");
  RunConfig c = BaseConfig(dir / "video");
  c.synth.render_video = true;
  c.synth.sentences_per_speaker = 12;
  c.synth.level_counts = {3, 3, 3, 3};
  c.synth.pool_size = 60;
  c.dct_k = 16;
  c.viseme_count = 32;
  RunAll(c);
  const json fm = Load(c.FeaturesDir() / "manifest.json");
  const std::string text = fm.dump();
  CHECK(text.find("dct:16@w3") != std::string::npos);
  const json report = Load(c.ReportPath());
  CHECK(report["summary"]["frame_phoneme_rate"].get<double>() > 0.5);
}

TEST_CASE("command-line binary") {
  TempDir dir("cli");
  const std::string out = (dir / "bin").string();
  auto r = Run(dir, "decode --output " + out);
  CHECK(r.status != 0);
  CHECK(r.err.find("missing model") != std::string::npos);
  CHECK(r.out.empty());

  r = Run(dir, "synth --jobs 2 --seed 4 --output " + out);
  CHECK(r.status == 0);
  CHECK(r.out.rfind("synth: 100 utterances", 0) == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 1);
  r = Run(dir, "stats --exact-permutation --output " + out);
  CHECK(r.status == 0);
  CHECK(r.out.find("rank-sum") != std::string::npos);
  CHECK(Load(dir / "bin" / "stats.json")["tests"][0]["rank_sum"]["method"] == "exact");

  r = Run(dir, "train --output " + out);
  CHECK(r.status != 0);
  CHECK(r.err.find("missing") != std::string::npos);
  r = Run(dir, "bogus");
  CHECK(r.status != 0);
  r = Run(dir, "synth --viseme-count 40");
  CHECK(r.status != 0);
  r = Run(dir, "--help");
  CHECK(r.status == 0);
  CHECK(r.out.find("--retrain-each-step") != std::string::npos);
}
