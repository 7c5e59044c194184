// tests/viseme-map-test.cc

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

#include "lrc/corpus.h"
#include "lrc/feature-io.h"
#include "lrc/lda.h"
#include "lrc/phonemes.h"
#include "lrc/synth.h"
#include "lrc/viseme-map.h"
#include "test-util.h"

using namespace lrc;
using doctest::Approx;

namespace {

ConfusionMatrix FromRows(const std::vector<std::vector<std::int64_t>> &rows) {
  ConfusionMatrix m(static_cast<int>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows.size(); ++j)
      m.at(static_cast<int>(i), static_cast<int>(j)) = rows[i][j];
  return m;
}

ConfusionMatrix RandomConfusion(Rng &rng, int c) {
  ConfusionMatrix m(c);
  for (int i = 0; i < c; ++i)
    for (int j = 0; j < c; ++j)
      m.at(i, j) = i == j ? rng.UniformInt(20, 80) : rng.UniformInt(0, 10);
  return m;
}

// Greedy merging over explicit groups of original classes, scoring each
// candidate directly from the original counts.
std::vector<std::pair<int, int>> ReferenceHistory(const ConfusionMatrix &m, int target) {
  std::vector<std::vector<int>> groups;
  for (int i = 0; i < m.classes(); ++i) groups.push_back({i});
  auto cell = [&](const std::vector<int> &a, const std::vector<int> &b) {
    double s = 0;
    for (int x : a)
      for (int y : b) s += static_cast<double>(m.at(x, y));
    return s;
  };
  auto row = [&](const std::vector<int> &a) {
    double s = 0;
    for (int x : a) s += static_cast<double>(m.RowTotal(x));
    return s;
  };
  std::vector<std::pair<int, int>> history;
  while (static_cast<int>(groups.size()) > target) {
    double best = -1;
    std::pair<int, int> pick{0, 1};
    for (std::size_t i = 0; i < groups.size(); ++i)
      for (std::size_t j = i + 1; j < groups.size(); ++j) {
        const double ri = row(groups[i]), rj = row(groups[j]);
        const double s = (ri > 0 ? cell(groups[i], groups[j]) / ri : 0.0) +
                         (rj > 0 ? cell(groups[j], groups[i]) / rj : 0.0);
        if (s > best) {
          best = s;
          pick = {static_cast<int>(i), static_cast<int>(j)};
        }
      }
    history.push_back(pick);
    auto &a = groups[static_cast<std::size_t>(pick.first)];
    const auto &b = groups[static_cast<std::size_t>(pick.second)];
    a.insert(a.end(), b.begin(), b.end());
    groups.erase(groups.begin() + pick.second);
  }
  return history;
}

}  // namespace

TEST_CASE("confusion matrix counts") {
  const std::vector<int> t = {0, 0, 1}, p = {0, 1, 1};
  CHECK(ComputeConfusion(t, p, 2) == FromRows({{1, 1}, {0, 1}}));
  const std::vector<int> same = {0, 2, 2, 1, 2};
  CHECK(ComputeConfusion(same, same, 3) == FromRows({{1, 0, 0}, {0, 1, 0}, {0, 0, 3}}));
  CHECK(ComputeConfusion({}, {}, 3).Total() == 0);
  CHECK_THROWS_AS(ComputeConfusion(t, same, 3), Error);
  const std::vector<int> big = {0, 5, 1};
  CHECK_THROWS_AS(ComputeConfusion(t, big, 2), Error);
}

TEST_CASE("ambiguity score") {
  const auto diag = FromRows({{4, 0, 0}, {0, 7, 0}, {0, 0, 1}});
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i != j) CHECK(AmbiguityScore(diag, i, j) == 0.0);
  const auto m = FromRows({{10, 5, 0}, {5, 10, 0}, {0, 0, 10}});
  CHECK(AmbiguityScore(m, 0, 1) == Approx(2.0 / 3.0));
  CHECK(AmbiguityScore(m, 0, 2) == 0.0);
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const auto r = RandomConfusion(rng, 6);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j)
        if (i != j) CHECK(AmbiguityScore(r, i, j) == AmbiguityScore(r, j, i));
  }
  // Empty rows contribute nothing.
  CHECK(AmbiguityScore(FromRows({{0, 0}, {3, 1}}), 0, 1) == Approx(0.75));
}

TEST_CASE("merge step") {
  const auto r = MergeStep(FromRows({{10, 5, 0}, {5, 10, 0}, {0, 0, 10}}));
  CHECK(r.pair == std::pair<int, int>{0, 1});
  CHECK(r.merged == FromRows({{30, 0}, {0, 10}}));
  const auto two = MergeStep(FromRows({{3, 4}, {5, 6}}));
  CHECK(two.merged == FromRows({{18}}));
  CHECK(MergeStep(FromRows({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}})).pair ==
        std::pair<int, int>{0, 1});
  CHECK_THROWS_AS(MergeStep(FromRows({{5}})), Error);
}

TEST_CASE("merging conserves the total count") {
  Rng rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    ConfusionMatrix m = RandomConfusion(rng, static_cast<int>(rng.UniformInt(2, 12)));
    const auto total = m.Total();
    while (m.classes() > 1) {
      m = MergeStep(m).merged;
      CHECK(m.Total() == total);
    }
  }
}

TEST_CASE("greedy merging matches an explicit group search") {
  Rng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const int c = static_cast<int>(rng.UniformInt(2, 14));
    const auto m = RandomConfusion(rng, c);
    const int v = static_cast<int>(rng.UniformInt(1, c));
    CHECK(MergeToCount(m, v).history == ReferenceHistory(m, v));
  }
}

TEST_CASE("merge to count: identity, single class, prefix property") {
  Rng rng(4);
  const auto m = RandomConfusion(rng, 32);
  const VisemeMap id = MergeToCount(m, 32);
  CHECK(id.history.empty());
  CHECK(id == VisemeMap::Identity(32));
  const VisemeMap one = MergeToCount(m, 1);
  CHECK(one.viseme_count == 1);
  for (int a : one.assignment) CHECK(a == 0);
  CHECK(MergeToCount(m, 20).history.size() == 12);
  for (int v = 1; v <= 32; ++v) {
    const VisemeMap map = MergeToCount(m, v);
    const std::vector<std::pair<int, int>> prefix(one.history.begin(),
                                                  one.history.begin() + (32 - v));
    CHECK(map.history == prefix);
    CHECK(map == VisemeMap::Replay(32, prefix));
    // Surjective onto 0..V-1.
    std::set<int> used(map.assignment.begin(), map.assignment.end());
    CHECK(used.size() == static_cast<std::size_t>(v));
    CHECK(*used.rbegin() == v - 1);
  }
  CHECK_THROWS_AS(MergeToCount(m, 0), Error);
  CHECK_THROWS_AS(MergeToCount(m, 33), Error);
}

TEST_CASE("viseme map file round trip") {
  Rng rng(5);
  VisemeMap map = MergeToCount(RandomConfusion(rng, 32), 20);
  map.fingerprint = "00000000deadbeef";
  map.source_fingerprint = "0123456789abcdef";
  const std::string text = FormatVisemeMap(map);
  const VisemeMap back = ParseVisemeMap(text, "x");
  CHECK(back == map);
  CHECK(back.fingerprint == map.fingerprint);
  CHECK(back.source_fingerprint == map.source_fingerprint);
  CHECK(text.find("p\t") != std::string::npos);
  CHECK(text.find("merge\t") != std::string::npos);
  CHECK_THROWS_AS(ParseVisemeMap("p\tq\n", "x"), Error);
}

TEST_CASE("build_viseme_map on synthetic corpora") {
  lrc::testing::TempDir dir("visemes");
  SynthConfig cfg;
  cfg.seed = 21;
  cfg.grouping = "coincident";
  const Dataset ds = GenCorpus(cfg, dir / "corpus");
  std::vector<LabeledSequence> seqs;
  for (const auto &u : ds.utterances) {
    if (u.split != "train") continue;
    seqs.push_back({ReadFeatureFile(ds.Resolve(u.feature_path)).frames, u.frame_labels});
  }
  VisemeMapOptions opt;
  opt.target = 20;
  opt.seed = 9;
  const VisemeMap a = BuildVisemeMap(seqs, MakeLdaTrainer(), opt);
  CHECK(a.history.size() == 12);
  const int p = *PhonemeAlphabet::Find("p"), b = *PhonemeAlphabet::Find("b"),
            m = *PhonemeAlphabet::Find("m");
  CHECK(a.assignment[p] == a.assignment[b]);
  CHECK(a.assignment[p] == a.assignment[m]);
  CHECK(a == BuildVisemeMap(seqs, MakeLdaTrainer(), opt));
  CHECK(a == VisemeMap::Replay(32, a.history));

  opt.target = 32;
  CHECK(BuildVisemeMap(seqs, MakeLdaTrainer(), opt) == VisemeMap::Identity(32));
  opt.target = 1;
  CHECK(BuildVisemeMap(seqs, MakeLdaTrainer(), opt).viseme_count == 1);

  // Drop every frame of /p/: training must refuse.
  std::vector<LabeledSequence> missing = seqs;
  for (auto &s : missing)
    for (auto &l : s.labels)
      if (l == p) l = b;
  opt.target = 20;
  CHECK_THROWS_WITH_AS(BuildVisemeMap(missing, MakeLdaTrainer(), opt),
                       doctest::Contains("insufficient"), Error);
}
