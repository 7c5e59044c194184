// tests/synth-oracle-test.cc

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

#include <cmath>
#include <map>
#include <set>

#include "lrc/feature-io.h"
#include "lrc/oracle.h"
#include "lrc/synth.h"
#include "test-util.h"

using namespace lrc;
using doctest::Approx;
using lrc::testing::TempDir;

namespace {

std::map<std::string, std::string> Snapshot(const std::filesystem::path &dir) {
  std::map<std::string, std::string> files;
  for (const auto &e : std::filesystem::recursive_directory_iterator(dir))
    if (e.is_regular_file())
      files[std::filesystem::relative(e.path(), dir).string()] = ReadFile(e.path());
  return files;
}

SynthConfig SmallConfig() {
  SynthConfig c;
  c.seed = 17;
  c.speakers = 2;
  c.sentences_per_speaker = 8;
  c.level_counts = {2, 2, 2, 2};
  c.pool_size = 40;
  return c;
}

}  // namespace

TEST_CASE("corpus generation is deterministic") {
  TempDir dir("synth");
  SynthConfig cfg = SmallConfig();
  cfg.render_video = true;
  const Dataset a = GenCorpus(cfg, dir / "a", 1);
  const Dataset b = GenCorpus(cfg, dir / "b", 4);
  CHECK(a.fingerprint == b.fingerprint);
  const auto sa = Snapshot(dir / "a"), sb = Snapshot(dir / "b");
  CHECK(sa.size() > 10);
  CHECK(sa == sb);
  cfg.seed = 18;
  const Dataset c = GenCorpus(cfg, dir / "c");
  CHECK(c.fingerprint != a.fingerprint);
}

TEST_CASE("default corpus shape and level bands") {
  TempDir dir("synth");
  SynthConfig cfg;
  const Dataset ds = GenCorpus(cfg, dir / "d");
  CHECK(ds.utterances.size() == 100);
  std::map<std::string, int> per_speaker;
  std::set<std::vector<std::string>> sentences;
  for (const auto &u : ds.utterances) {
    ++per_speaker[u.speaker_id];
    sentences.insert(u.text);
    const auto band = kLevelBands[u.level - 1];
    CHECK(static_cast<int>(u.text.size()) >= band[0]);
    CHECK(static_cast<int>(u.text.size()) <= band[1]);
    if (u.level == 1) CHECK((u.text.size() == 3 || u.text.size() == 4));
    CHECK(u.split == (u.speaker_id == "spk04" ? "test" : "train"));
  }
  CHECK(per_speaker.size() == 4);
  for (const auto &[s, n] : per_speaker) CHECK(n == 25);
  CHECK(ds.participants.size() == 24);
  for (const auto &p : ds.participants) {
    CHECK(p.accuracies.size() == 3);
    for (const auto &rep : p.accuracies) {
      CHECK(rep.size() == 25);
      for (double v : rep) CHECK((v >= 0.0 && v <= 1.0));
    }
  }
  CHECK(kLevelBands[0] == std::array<int, 2>{3, 4});
  CHECK(kLevelBands[1] == std::array<int, 2>{5, 6});
  CHECK(kLevelBands[2] == std::array<int, 2>{7, 8});
}

TEST_CASE("zero spread puts every frame on its cluster mean") {
  TempDir dir("synth");
  SynthConfig cfg = SmallConfig();
  cfg.spread = 0.0;
  cfg.grouping = "coincident";
  const Dataset ds = GenCorpus(cfg, dir / "z");
  const auto groups = cfg.ResolvedGroups();
  const int clusters = *std::max_element(groups.begin(), groups.end()) + 1;
  CHECK(clusters == 20);
  const Matrix means = ClusterMeans(cfg, clusters, 4);
  for (const auto &u : ds.utterances) {
    const FeatureFile f = ReadFeatureFile(ds.Resolve(u.feature_path));
    REQUIRE(f.frames.rows == u.frame_labels.size());
    for (std::size_t t = 0; t < f.frames.rows; ++t) {
      const int g = groups[u.frame_labels[t]];
      for (std::size_t d = 0; d < f.frames.cols; ++d)
        CHECK(f.frames(t, d) == static_cast<float>(means(g, d)));
    }
  }
  // Closest cluster pair sits exactly `separation` apart.
  double closest = 1e300;
  for (int i = 0; i < clusters; ++i)
    for (int j = i + 1; j < clusters; ++j) {
      double d2 = 0;
      for (std::size_t d = 0; d < means.cols; ++d)
        d2 += (means(i, d) - means(j, d)) * (means(i, d) - means(j, d));
      closest = std::min(closest, std::sqrt(d2));
    }
  CHECK(closest == Approx(cfg.separation).epsilon(1e-9));
}

TEST_CASE("synth config validation") {
  SynthConfig c;
  c.level_counts = {6, 6, 6, 6};
  CHECK_THROWS_AS(c.Validate(), Error);
  c = SynthConfig();
  c.consonant.min = 0;
  CHECK_THROWS_AS(c.Validate(), Error);
  c = SynthConfig();
  c.grouping = "other";
  CHECK_THROWS_AS(c.Validate(), Error);
  c = SynthConfig();
  nlohmann::json j = c;
  SynthConfig back = j.get<SynthConfig>();
  CHECK(nlohmann::json(back) == j);
}

TEST_CASE("brute-force viterbi") {
  HmmModel one;
  one.transitions = Matrix(1, 1, 1.0);
  one.initial = {1.0};
  one.emissions = Matrix(1, 2, 0.5);
  Matrix s(3, 2);
  s(0, 0) = 0.2, s(1, 1) = 0.6, s(2, 0) = 1.0;
  const auto r = BruteForceViterbi(one, s);
  CHECK(r.enumerated == 1);
  CHECK(r.path == std::vector<int>{0, 0, 0});
  CHECK(r.log_prob == Approx(std::log(0.1) + std::log(0.3) + std::log(0.5)));

  HmmModel flat;
  flat.transitions = Matrix(3, 3, 1.0 / 3);
  flat.initial.assign(3, 1.0 / 3);
  flat.emissions = Matrix(3, 2, 0.5);
  const auto f = BruteForceViterbi(flat, Matrix(4, 2, 0.5));
  CHECK(f.enumerated == 81);
  CHECK(f.path == std::vector<int>{0, 0, 0, 0});

  Rng rng(1);
  const HmmModel big = lrc::testing::RandomHmm(rng, 10, 3);
  CHECK_THROWS_WITH_AS(BruteForceViterbi(big, lrc::testing::RandomScores(rng, 7, 3)),
                       doctest::Contains("too large"), Error);
  CHECK(BruteForceViterbi(big, lrc::testing::RandomScores(rng, 6, 3)).enumerated == 1000000);
}

TEST_CASE("closed-form two-class lda") {
  Matrix x(8, 2);
  std::vector<int> y(8);
  const double dev[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  for (int k = 0; k < 8; ++k) {
    y[k] = k / 4;
    x(k, 0) = (k < 4 ? 2.0 : 0.0) + dev[k % 4][0];
    x(k, 1) = (k < 4 ? 1.0 : 0.0) + dev[k % 4][1];
  }
  const auto w = ClosedFormLda2Class(x, y);
  CHECK(w[0] / w[1] == Approx(2.0));
  Matrix flat(4, 2);
  for (std::size_t r = 0; r < 4; ++r) flat(r, 0) = static_cast<double>(r);
  const std::vector<int> y4 = {0, 0, 1, 1};
  CHECK_THROWS_AS(ClosedFormLda2Class(flat, y4), Error);
}

TEST_CASE("permutation p-values") {
  const std::vector<double> x = {3, 4}, y = {1, 2};
  CHECK(ExactPermutationPValue(x, y) == Approx(1.0 / 6.0));
  const double mc = PermutationPValue(x, y, 100000, 3);
  CHECK(std::abs(mc - 1.0 / 6.0) < 3 * std::sqrt(1.0 / 6 * 5.0 / 6 / 1e5) + 1e-5);

  Rng rng(2);
  std::vector<double> g(12);
  for (double &v : g) v = rng.Normal();
  const double same = PermutationPValue(g, g, 20000, 4);
  const double se = std::sqrt(0.25 / 20000);
  CHECK(same >= 0.5 - 3 * se);
  CHECK(same <= 0.5 + 3 * se + 0.05);

  std::vector<double> base(8), other(8);
  for (double &v : base) v = rng.Normal();
  for (double &v : other) v = rng.Normal();
  double last = 1.0;
  for (double shift = -2.0; shift <= 4.0; shift += 0.25) {
    std::vector<double> moved = base;
    for (double &v : moved) v += shift;
    const double p = PermutationPValue(moved, other, 2000, 5);
    CHECK(p <= last);
    last = p;
  }
  CHECK_THROWS_AS(PermutationPValue(x, y, 999, 1), Error);
}
