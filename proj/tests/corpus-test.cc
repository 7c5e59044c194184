// tests/corpus-test.cc

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

#include <set>

#include "json.hpp"
#include "lrc/corpus.h"
#include "lrc/synth.h"
#include "test-util.h"

using namespace lrc;
using lrc::testing::TempDir;

namespace {

Lexicon LaLexicon() {
  Lexicon lex;
  lex.Add("la", {*PhonemeAlphabet::Find("l"), *PhonemeAlphabet::Find("a")});
  return lex;
}

// One utterance of four frames a,a,s,s.
void WriteMinimalCorpus(const TempDir &dir, const std::string &labels) {
  WriteFileAtomic(dir / "lexicon.txt", "la\tl a\nsa\ts a\n");
  WriteFileAtomic(dir / "u1.lab", labels);
  nlohmann::json m = {
      {"lexicon", "lexicon.txt"},
      {"utterances",
       {{{"id", "u1"}, {"speaker", "s1"}, {"level", 1}, {"text", {"la"}},
         {"label_path", "u1.lab"}, {"frame_rate", 50}}}}};
  WriteFileAtomic(dir / "manifest.json", m.dump());
}

}  // namespace

TEST_CASE("alphabet holds the 31 SAMPA phonemes plus silence") {
  const std::vector<std::string> sampa = {
      "p", "b", "t", "d", "k", "g", "tS", "jj", "f", "B", "T", "D", "s", "z", "x", "G",
      "m", "n", "N", "J", "l", "L", "r", "4", "j", "w", "a", "e", "i", "o", "u"};
  REQUIRE(PhonemeAlphabet::kSize == 32);
  std::set<std::string_view> unique(PhonemeAlphabet::kSymbols.begin(),
                                    PhonemeAlphabet::kSymbols.end());
  CHECK(unique.size() == 32);
  CHECK(std::count(PhonemeAlphabet::kSymbols.begin(), PhonemeAlphabet::kSymbols.end(),
                   "sil") == 1);
  for (int p = 0; p < 31; ++p) CHECK(PhonemeAlphabet::Symbol(p) == sampa[p]);
  CHECK(PhonemeAlphabet::Symbol(PhonemeAlphabet::kSilence) == "sil");
  for (int p = 0; p < 32; ++p) CHECK(PhonemeAlphabet::Find(PhonemeAlphabet::Symbol(p)) == p);
  CHECK_FALSE(PhonemeAlphabet::Find("zz"));
}

TEST_CASE("load_manifest on a minimal corpus") {
  TempDir dir("corpus");
  WriteMinimalCorpus(dir, "0\ta\n1\ta\n2\ts\n3\ts\n");
  const Dataset ds = LoadManifest(dir / "manifest.json");
  REQUIRE(ds.utterances.size() == 1);
  const Utterance *u = ds.Find("u1");
  REQUIRE(u);
  CHECK(u->frame_labels.size() == 4);
  CHECK(u->frame_labels[0] == *PhonemeAlphabet::Find("a"));
  CHECK(u->frame_labels[3] == *PhonemeAlphabet::Find("s"));
  CHECK(u->frame_rate == 50.0);
  CHECK_FALSE(ds.fingerprint.empty());
}

TEST_CASE("load_manifest rejects an unknown phoneme with token and line") {
  TempDir dir("corpus");
  WriteMinimalCorpus(dir, "0\ta\n1\tzz\n");
  try {
    LoadManifest(dir / "manifest.json");
    FAIL("expected an error");
  } catch (const Error &e) {
    const std::string what = e.what();
    CHECK(what.find("unknown phoneme 'zz'") != std::string::npos);
    CHECK(what.find("u1.lab:2") != std::string::npos);
  }
}

TEST_CASE("load_manifest error paths") {
  TempDir dir("corpus");
  CHECK_THROWS_WITH_AS(LoadManifest(dir / "nope.json"), doctest::Contains("missing file"),
                       Error);
  WriteFileAtomic(dir / "bad.json", "{ not json");
  CHECK_THROWS_WITH_AS(LoadManifest(dir / "bad.json"), doctest::Contains("malformed"), Error);
  WriteFileAtomic(dir / "lexicon.txt", "la\tl a\n");
  WriteFileAtomic(dir / "nolabels.json",
                  R"({"utterances":[{"id":"u","speaker":"s","level":1,"text":["la"],
                      "label_path":"missing.lab"}]})");
  CHECK_THROWS_WITH_AS(LoadManifest(dir / "nolabels.json"), doctest::Contains("missing file"),
                       Error);
  WriteFileAtomic(dir / "u.lab", "0\tl\n");
  WriteFileAtomic(dir / "level.json",
                  R"({"utterances":[{"id":"u","speaker":"s","level":5,"text":["la"],
                      "label_path":"u.lab"}]})");
  CHECK_THROWS_WITH_AS(LoadManifest(dir / "level.json"), doctest::Contains("level"), Error);
  WriteFileAtomic(dir / "oov.json",
                  R"({"lexicon":"lexicon.txt","utterances":[{"id":"u","speaker":"s",
                      "level":1,"text":["qwz"],"label_path":"u.lab"}]})");
  CHECK_THROWS_WITH_AS(LoadManifest(dir / "oov.json"), doctest::Contains("qwz"), Error);
  WriteFileAtomic(dir / "nokey.json", R"({"utterances":[{"id":"u","level":1}]})");
  CHECK_THROWS_WITH_AS(LoadManifest(dir / "nokey.json"), doctest::Contains("speaker"), Error);
}

TEST_CASE("label files must be contiguous from frame 0") {
  CHECK(ParseLabels("# comment\n0\ta\n1\tsil\n", "x").size() == 2);
  CHECK_THROWS_WITH_AS(ParseLabels("1\ta\n", "x"), doctest::Contains("out of sequence"), Error);
  CHECK_THROWS_WITH_AS(ParseLabels("0\ta\n0\ta\n", "x"), doctest::Contains("out of sequence"),
                       Error);
  CHECK_THROWS_WITH_AS(ParseLabels("0 a extra\n", "x"), doctest::Contains("malformed"), Error);
  CHECK_THROWS_WITH_AS(ParseLabels("x\ta\n", "x"), doctest::Contains("malformed frame index"),
                       Error);
}

TEST_CASE("load_manifest never accepts a label outside the alphabet") {
  // Property: corrupting one symbol of a valid label file always fails.
  TempDir dir("corrupt");
  Rng rng(7);
  const std::string junk = "qxyzQ0123_-!";
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = static_cast<std::size_t>(rng.UniformInt(1, 30));
    std::vector<PhonemeId> labels = lrc::testing::RandomLabels(rng, n, 32);
    std::string text = FormatLabels(labels);
    // Replace one symbol by a random token that is not a phoneme.
    const std::size_t victim = static_cast<std::size_t>(rng.UniformInt(0, n - 1));
    std::string token;
    do {
      token.clear();
      const auto len = rng.UniformInt(1, 3);
      for (int k = 0; k < len; ++k)
        token += junk[static_cast<std::size_t>(rng.UniformInt(0, junk.size() - 1))];
    } while (PhonemeAlphabet::Find(token));
    std::vector<std::string> lines;
    std::istringstream is(text);
    for (std::string l; std::getline(is, l);) lines.push_back(l);
    lines[victim] = std::to_string(victim) + "\t" + token;
    text.clear();
    for (const auto &l : lines) text += l + "\n";
    WriteMinimalCorpus(dir, text);
    CHECK_THROWS_WITH_AS(LoadManifest(dir / "manifest.json"),
                         doctest::Contains("unknown phoneme"), Error);
  }
}

TEST_CASE("validate_alignment") {
  Utterance u;
  u.frame_labels = {0, 0, 1, 1};
  auto r = ValidateAlignment(u, 4);
  CHECK(r.ok);
  CHECK(r.delta == 0);
  r = ValidateAlignment(u, 5);
  CHECK_FALSE(r.ok);
  CHECK(r.delta == 1);
  u.frame_labels.clear();
  r = ValidateAlignment(u, 0);
  CHECK_FALSE(r.ok);
  CHECK(r.empty);
}

TEST_CASE("words_to_phonemes") {
  const Lexicon lex = LaLexicon();
  const PhonemeId l = *PhonemeAlphabet::Find("l"), a = *PhonemeAlphabet::Find("a");
  auto one = WordsToPhonemes({"la"}, lex);
  CHECK(one.phonemes == std::vector<PhonemeId>{l, a});
  CHECK(one.word_starts == std::vector<std::size_t>{0});
  auto two = WordsToPhonemes({"la", "la"}, lex);
  CHECK(two.phonemes == std::vector<PhonemeId>{l, a, l, a});
  CHECK(two.word_starts == std::vector<std::size_t>{0, 2});
  CHECK_THROWS_WITH_AS(WordsToPhonemes({"qwz"}, lex), doctest::Contains("qwz"), Error);
}

TEST_CASE("words_to_phonemes length equals the sum of pronunciations") {
  SynthConfig cfg;
  const Lexicon lex = GenLexicon(cfg);
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::string> text;
    std::size_t expect = 0;
    const auto n = rng.UniformInt(0, 12);
    for (int k = 0; k < n; ++k) {
      const auto &e = lex.entries()[static_cast<std::size_t>(
          rng.UniformInt(0, static_cast<std::int64_t>(lex.size()) - 1))];
      text.push_back(e.word);
      expect += e.pronunciation.size();
    }
    const auto ps = WordsToPhonemes(text, lex);
    CHECK(ps.phonemes.size() == expect);
    CHECK(ps.word_starts.size() == text.size());
  }
}

TEST_CASE("lexicon file round trip and validation") {
  TempDir dir("lex");
  WriteFileAtomic(dir / "lex.txt", "# words\nla\tl a\ntSo\ttS o\n");
  const Lexicon lex = ReadLexicon(dir / "lex.txt");
  REQUIRE(lex.size() == 2);
  CHECK(lex.Find("tSo")->pronunciation.size() == 2);
  WriteFileAtomic(dir / "lex2.txt", FormatLexicon(lex));
  CHECK(ReadLexicon(dir / "lex2.txt") == lex);
  WriteFileAtomic(dir / "bad.txt", "la\tl qq\n");
  CHECK_THROWS_WITH_AS(ReadLexicon(dir / "bad.txt"), doctest::Contains("unknown phoneme 'qq'"),
                       Error);
  WriteFileAtomic(dir / "empty.txt", "la\n");
  CHECK_THROWS_AS(ReadLexicon(dir / "empty.txt"), Error);
  Lexicon dup;
  dup.Add("la", {1});
  CHECK_THROWS_AS(dup.Add("la", {2}), Error);
}

TEST_CASE("serializing then loading a dataset is the identity") {
  TempDir dir("roundtrip");
  SynthConfig cfg;
  cfg.seed = 11;
  cfg.speakers = 2;
  cfg.sentences_per_speaker = 4;
  cfg.level_counts = {1, 1, 1, 1};
  cfg.pool_size = 40;
  cfg.hearing_impaired = 2;
  cfg.normal_hearing = 3;
  const Dataset a = GenCorpus(cfg, dir / "a");
  SaveDataset(a, dir / "b");
  // Feature files are not part of SaveDataset; copy them across.
  std::filesystem::copy(dir / "a" / "features", dir / "b" / "features");
  const Dataset b = LoadManifest(dir / "b" / "manifest.json");
  CHECK(a.fingerprint == b.fingerprint);
  CHECK(a.lexicon == b.lexicon);
  CHECK(a.utterances == b.utterances);
  CHECK(a.participants == b.participants);
  CHECK(a.config_json == b.config_json);
}

TEST_CASE("interval tiers convert by frame midpoint") {
  // 50 fps: frame i covers [i/50, (i+1)/50), midpoint (i+0.5)/50.
  std::vector<Interval> iv = {{0.0, 0.05, ""}, {0.05, 0.11, "a"}, {0.11, 0.16, "s"}};
  const auto labels = IntervalsToFrameLabels(iv, 50.0);
  // Midpoints 0.01 0.03 0.05 0.07 0.09 0.11 0.13 0.15.
  const PhonemeId sil = PhonemeAlphabet::kSilence, a = *PhonemeAlphabet::Find("a"),
                  s = *PhonemeAlphabet::Find("s");
  CHECK(labels == std::vector<PhonemeId>{sil, sil, a, a, a, s, s, s});
  // Frames past the last interval are silence.
  CHECK(IntervalsToFrameLabels(iv, 50.0, 10).back() == sil);
  CHECK_THROWS_AS(IntervalsToFrameLabels({{0.0, 1.0, "zz"}}, 50.0), Error);
}

TEST_CASE("TextGrid interval tier import") {
  const std::string tg = R"(File type = "ooTextFile"
Object class = "TextGrid"

xmin = 0
xmax = 0.1
tiers? <exists>
size = 1
item []:
    item [1]:
        class = "IntervalTier"
        name = "phones"
        xmin = 0
        xmax = 0.1
        intervals: size = 3
        intervals [1]:
            xmin = 0
            xmax = 0.02
            text = ""
        intervals [2]:
            xmin = 0.02
            xmax = 0.06
            text = "p"
        intervals [3]:
            xmin = 0.06
            xmax = 0.1
            text = "a"
)";
  TempDir dir("tg");
  WriteFileAtomic(dir / "x.TextGrid", tg);
  const auto iv = ReadIntervals(dir / "x.TextGrid");
  REQUIRE(iv.size() == 3);
  CHECK(iv[1].symbol == "p");
  const auto labels = IntervalsToFrameLabels(iv, 50.0);
  CHECK(labels == std::vector<PhonemeId>{PhonemeAlphabet::kSilence, 0, 0, 26, 26});
  WriteFileAtomic(dir / "x.tsv", "0\t0.02\n0.02\t0.06\tp\n");
  CHECK(ReadIntervals(dir / "x.tsv").size() == 2);
}
