// tests/features-test.cc

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
#include <numbers>
#include <set>

#include "lrc/feature-io.h"
#include "lrc/features.h"
#include "test-util.h"

using namespace lrc;
using doctest::Approx;

namespace {

// Direct evaluation of the orthonormal 2-D DCT-II sum.
Image ReferenceDct(const Image &x) {
  const int h = x.height, w = x.width;
  Image out(h, w);
  for (int u = 0; u < h; ++u)
    for (int v = 0; v < w; ++v) {
      double s = 0.0;
      for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
          s += x.at(r, c) * std::cos(std::numbers::pi * (2 * r + 1) * u / (2.0 * h)) *
               std::cos(std::numbers::pi * (2 * c + 1) * v / (2.0 * w));
      const double au = u == 0 ? std::sqrt(1.0 / h) : std::sqrt(2.0 / h);
      const double av = v == 0 ? std::sqrt(1.0 / w) : std::sqrt(2.0 / w);
      out.at(u, v) = au * av * s;
    }
  return out;
}

Image RandomImage(Rng &rng, int h, int w) {
  Image im(h, w);
  for (double &p : im.pixels) p = rng.Uniform01() * 255.0;
  return im;
}

double Energy(const Image &im) {
  double e = 0.0;
  for (double p : im.pixels) e += p * p;
  return e;
}

Matrix RandomMatrix(Rng &rng, std::size_t rows, std::size_t cols, double mu, double sd) {
  Matrix m(rows, cols);
  for (double &x : m.data) x = mu + sd * rng.Normal();
  return m;
}

}  // namespace

TEST_CASE("dct of a constant 2x2 block") {
  const Image c = Dct2d(Image(2, 2, 1.0));
  CHECK(c.at(0, 0) == Approx(2.0));
  CHECK(std::abs(c.at(0, 1)) < 1e-12);
  CHECK(std::abs(c.at(1, 0)) < 1e-12);
  CHECK(std::abs(c.at(1, 1)) < 1e-12);
}

TEST_CASE("dct matches the direct sum, inverts and preserves energy") {
  Rng rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const int h = static_cast<int>(rng.UniformInt(1, 12));
    const int w = static_cast<int>(rng.UniformInt(1, 12));
    const Image x = RandomImage(rng, h, w);
    const Image c = Dct2d(x);
    const Image ref = ReferenceDct(x);
    for (std::size_t i = 0; i < c.pixels.size(); ++i)
      CHECK(c.pixels[i] == Approx(ref.pixels[i]).epsilon(1e-9).scale(255.0));
    CHECK(Energy(c) == Approx(Energy(x)).epsilon(1e-9));
    const Image back = InverseDct2d(c);
    for (std::size_t i = 0; i < x.pixels.size(); ++i)
      CHECK(std::abs(back.pixels[i] - x.pixels[i]) < 1e-6);
  }
}

TEST_CASE("dct is linear") {
  Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const int h = static_cast<int>(rng.UniformInt(1, 10));
    const int w = static_cast<int>(rng.UniformInt(1, 10));
    const Image x = RandomImage(rng, h, w), y = RandomImage(rng, h, w);
    const double a = rng.Uniform01() * 4 - 2, b = rng.Uniform01() * 4 - 2;
    Image z(h, w);
    for (std::size_t i = 0; i < z.pixels.size(); ++i)
      z.pixels[i] = a * x.pixels[i] + b * y.pixels[i];
    const Image cx = Dct2d(x), cy = Dct2d(y), cz = Dct2d(z);
    for (std::size_t i = 0; i < z.pixels.size(); ++i)
      CHECK(std::abs(cz.pixels[i] - (a * cx.pixels[i] + b * cy.pixels[i])) < 1e-8);
  }
}

TEST_CASE("zig-zag order") {
  Image g(2, 2);
  g.at(0, 0) = 1;  // a
  g.at(0, 1) = 2;  // b
  g.at(1, 0) = 3;  // c
  g.at(1, 1) = 4;  // d
  CHECK(SelectCoefficients(g, 4) == std::vector<double>{1, 2, 3, 4});
  const auto z = ZigZagOrder(4, 4);
  const std::vector<std::pair<int, int>> jpeg = {
      {0, 0}, {0, 1}, {1, 0}, {2, 0}, {1, 1}, {0, 2}, {0, 3}, {1, 2},
      {2, 1}, {3, 0}, {3, 1}, {2, 2}, {1, 3}, {2, 3}, {3, 2}, {3, 3}};
  CHECK(z == jpeg);
  for (int h = 1; h <= 9; ++h)
    for (int w = 1; w <= 9; ++w) {
      const auto o = ZigZagOrder(h, w);
      CHECK(o.size() == static_cast<std::size_t>(h * w));
      std::set<std::pair<int, int>> seen(o.begin(), o.end());
      CHECK(seen.size() == o.size());
      for (std::size_t i = 1; i < o.size(); ++i)
        CHECK(o[i].first + o[i].second >= o[i - 1].first + o[i - 1].second);
    }
}

TEST_CASE("coefficient selection is prefix-stable") {
  Rng rng(7);
  const Image c = Dct2d(RandomImage(rng, 8, 8));
  const auto all = SelectCoefficients(c, 64);
  for (int k = 1; k <= 64; ++k) {
    const auto part = SelectCoefficients(c, k);
    REQUIRE(part.size() == static_cast<std::size_t>(k));
    CHECK(std::equal(part.begin(), part.end(), all.begin()));
  }
  CHECK_THROWS_AS(SelectCoefficients(c, 65), Error);
}

TEST_CASE("constant roi has only a DC coefficient") {
  const auto v = SelectCoefficients(Dct2d(Image(4, 4, 0.5)), 3);
  CHECK(v[0] == Approx(2.0));
  CHECK(std::abs(v[1]) < 1e-12);
  CHECK(std::abs(v[2]) < 1e-12);
}

TEST_CASE("temporal windowing") {
  Matrix f(3, 2);
  for (std::size_t t = 0; t < 3; ++t) {
    f(t, 0) = static_cast<double>(t);
    f(t, 1) = 10.0 + t;
  }
  CHECK(TemporalFuse(f, 1) == f);
  const Matrix w3 = TemporalFuse(f, 3);
  REQUIRE(w3.rows == 3);
  REQUIRE(w3.cols == 6);
  CHECK(std::vector<double>(w3.Row(0), w3.Row(0) + 6) ==
        std::vector<double>{0, 10, 0, 10, 1, 11});
  CHECK(std::vector<double>(w3.Row(1), w3.Row(1) + 6) ==
        std::vector<double>{0, 10, 1, 11, 2, 12});
  CHECK(std::vector<double>(w3.Row(2), w3.Row(2) + 6) ==
        std::vector<double>{1, 11, 2, 12, 2, 12});
  CHECK_THROWS_AS(TemporalFuse(f, 2), Error);
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const auto t = static_cast<std::size_t>(rng.UniformInt(1, 20));
    const auto d = static_cast<std::size_t>(rng.UniformInt(1, 5));
    const int w = 2 * static_cast<int>(rng.UniformInt(0, 3)) + 1;
    const Matrix out = TemporalFuse(RandomMatrix(rng, t, d, 0, 1), w);
    CHECK(out.rows == t);
    CHECK(out.cols == d * static_cast<std::size_t>(w));
  }
}

TEST_CASE("early fusion standardizes each stream") {
  Rng rng(9);
  std::vector<Matrix> parts = {RandomMatrix(rng, 200, 4, 5.0, 3.0),
                               RandomMatrix(rng, 200, 6, -2.0, 0.1)};
  const std::vector<Standardizer> stats = {Standardizer::Fit({&parts[0], 1}),
                                           Standardizer::Fit({&parts[1], 1})};
  const Matrix fused = FuseEarly(parts, stats);
  REQUIRE(fused.cols == 10);
  REQUIRE(fused.rows == 200);
  for (std::size_t c = 0; c < fused.cols; ++c) {
    double m = 0.0, v = 0.0;
    for (std::size_t r = 0; r < fused.rows; ++r) m += fused(r, c);
    m /= fused.rows;
    for (std::size_t r = 0; r < fused.rows; ++r) v += (fused(r, c) - m) * (fused(r, c) - m);
    v /= fused.rows;
    CHECK(std::abs(m) < 1e-9);
    CHECK(v == Approx(1.0).epsilon(1e-9));
  }
  Matrix short_part = RandomMatrix(rng, 100, 6, 0, 1);
  std::vector<Matrix> bad = {parts[0], short_part};
  CHECK_THROWS_AS(FuseEarly(bad, stats), Error);
}

TEST_CASE("standardizer keeps constant columns finite") {
  Matrix m(5, 2, 3.0);
  for (std::size_t r = 0; r < 5; ++r) m(r, 1) = static_cast<double>(r);
  const Standardizer s = Standardizer::Fit({&m, 1});
  CHECK(s.scale[0] == 1.0);
  const Matrix z = s.Apply(m);
  for (std::size_t r = 0; r < 5; ++r) CHECK(z(r, 0) == 0.0);
}

TEST_CASE("roi normalization") {
  Rng rng(10);
  Image im = RandomImage(rng, 40, 50);
  for (double &p : im.pixels) p = std::floor(p);
  RoiConfig cfg;
  cfg.height = 8;
  cfg.width = 8;
  cfg.intensity_scale = 255.0;
  // A box spanning exactly 8x8 pixels reproduces them.
  const std::vector<Point> box = {{10, 5}, {17, 5}, {10, 12}, {17, 12}, {13, 9}};
  const RoiFrame f = NormalizeRoi(im, box, cfg, 42);
  CHECK(f.source_frame == 42);
  REQUIRE(f.roi.height == 8);
  REQUIRE(f.roi.width == 8);
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 8; ++c)
      CHECK(f.roi.at(r, c) == Approx(im.at(5 + r, 10 + c) / 255.0));

  // Uniform image: every sample equals the constant.
  const RoiFrame u = NormalizeRoi(Image(20, 20, 102.0), box, cfg);
  for (double p : u.roi.pixels) CHECK(p == Approx(0.4));

  // Values stay in [0, 1] for any box inside or outside the image.
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Point> pts(4);
    for (auto &p : pts) p = {rng.Uniform01() * 70 - 10, rng.Uniform01() * 60 - 10};
    RoiConfig c2 = cfg;
    c2.margin = rng.Uniform01() * 0.5;
    c2.intensity_scale = 100.0;
    try {
      const RoiFrame g = NormalizeRoi(im, pts, c2);
      for (double p : g.roi.pixels) CHECK((p >= 0.0 && p <= 1.0));
    } catch (const Error &) {
    }
  }

  const std::vector<Point> point = {{3, 3}, {3, 3}, {3, 3}, {3, 3}};
  CHECK_THROWS_WITH_AS(NormalizeRoi(im, point, cfg), doctest::Contains("degenerate"), Error);
  CHECK_THROWS_AS(NormalizeRoi(im, {}, cfg), Error);
}

TEST_CASE("feature file round trip") {
  lrc::testing::TempDir dir("feat");
  Rng rng(11);
  FeatureFile f;
  f.flags = kFeatureDct | kFeatureTemporal;
  f.layout = "dct:4@w3";
  f.fingerprint = "0123456789abcdef";
  f.frames = RandomMatrix(rng, 7, 12, 0, 1);
  for (double &x : f.frames.data) x = static_cast<float>(x);
  WriteFeatureFile(dir / "a.lrcf", f);
  const FeatureFile g = ReadFeatureFile(dir / "a.lrcf");
  CHECK(g.flags == f.flags);
  CHECK(g.layout == f.layout);
  CHECK(g.fingerprint == f.fingerprint);
  CHECK(g.frames == f.frames);
  const std::string bytes = ReadFile(dir / "a.lrcf");
  CHECK(bytes.substr(0, 4) == "LRCF");
  CHECK(bytes.size() == 28 + f.layout.size() + f.fingerprint.size() + 4 * 7 * 12);
  CHECK(EncodeFeatureFile(f) == bytes);
  CHECK_THROWS_AS(DecodeFeatureFile(bytes.substr(0, bytes.size() - 1), "x"), Error);
  CHECK_THROWS_AS(DecodeFeatureFile("XXXX" + bytes.substr(4), "x"), Error);
}

TEST_CASE("feature extraction is deterministic") {
  Rng a(12), b(12);
  const Image x = RandomImage(a, 16, 16), y = RandomImage(b, 16, 16);
  CHECK(SelectCoefficients(Dct2d(x), 20) == SelectCoefficients(Dct2d(y), 20));
}
