// src/features.cc

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

#include "lrc/features.h"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace lrc {

RoiFrame NormalizeRoi(const Image &image, std::span<const Point> landmarks,
                      const RoiConfig &config, std::int64_t source_frame) {
  if (config.height < 1 || config.width < 1)
    throw Error("ROI size must be at least 1x1");
  if (landmarks.size() < 4)
    throw Error("need at least 4 mouth landmarks, got " +
                std::to_string(landmarks.size()));
  double x0 = landmarks[0].x, x1 = x0, y0 = landmarks[0].y, y1 = y0;
  for (const Point &p : landmarks) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || p.x < 0 || p.y < 0 ||
        p.x > image.width - 1 || p.y > image.height - 1)
      throw Error("landmark outside image bounds");
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  if (x1 - x0 <= 0.0 || y1 - y0 <= 0.0)
    throw Error("degenerate landmark box (zero area)");
  const double mx = config.margin * (x1 - x0), my = config.margin * (y1 - y0);
  x0 -= mx;
  x1 += mx;
  y0 -= my;
  y1 += my;

  auto pixel = [&](int r, int c) {
    r = std::clamp(r, 0, image.height - 1);
    c = std::clamp(c, 0, image.width - 1);
    return image.at(r, c);
  };
  RoiFrame out{Image(config.height, config.width), source_frame};
  const double sy = config.height > 1 ? (y1 - y0) / (config.height - 1) : 0.0;
  const double sx = config.width > 1 ? (x1 - x0) / (config.width - 1) : 0.0;
  for (int r = 0; r < config.height; ++r) {
    const double y = config.height > 1 ? y0 + r * sy : 0.5 * (y0 + y1);
    const int iy = static_cast<int>(std::floor(y));
    const double fy = y - iy;
    for (int c = 0; c < config.width; ++c) {
      const double x = config.width > 1 ? x0 + c * sx : 0.5 * (x0 + x1);
      const int ix = static_cast<int>(std::floor(x));
      const double fx = x - ix;
      double v = pixel(iy, ix);
      // Skip zero-weight neighbours so exact grid hits copy the pixel.
      if (fx != 0.0 || fy != 0.0) {
        v = (1 - fy) * ((1 - fx) * pixel(iy, ix) + fx * pixel(iy, ix + 1)) +
            fy * ((1 - fx) * pixel(iy + 1, ix) + fx * pixel(iy + 1, ix + 1));
      }
      out.roi.at(r, c) = std::clamp(v / config.intensity_scale, 0.0, 1.0);
    }
  }
  return out;
}

namespace {

// basis[k * n + i] = alpha(k) cos(pi (2i + 1) k / 2n)
std::vector<double> DctBasis(int n) {
  std::vector<double> b(static_cast<std::size_t>(n) * n);
  for (int k = 0; k < n; ++k) {
    const double alpha = k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
    for (int i = 0; i < n; ++i)
      b[static_cast<std::size_t>(k) * n + i] =
          alpha * std::cos(std::numbers::pi * (2 * i + 1) * k / (2.0 * n));
  }
  return b;
}

// out = Bh * in * Bw^T when forward, Bh^T * in * Bw otherwise.
Image Separable(const Image &in, bool forward) {
  const int h = in.height, w = in.width;
  if (h < 1 || w < 1) throw Error("DCT input must be at least 1x1");
  const auto bh = DctBasis(h), bw = DctBasis(w);
  auto coef = [forward](const std::vector<double> &b, int n, int k, int i) {
    return forward ? b[static_cast<std::size_t>(k) * n + i]
                   : b[static_cast<std::size_t>(i) * n + k];
  };
  Image tmp(h, w);
  for (int r = 0; r < h; ++r)
    for (int k = 0; k < w; ++k) {
      double s = 0.0;
      for (int c = 0; c < w; ++c) s += coef(bw, w, k, c) * in.at(r, c);
      tmp.at(r, k) = s;
    }
  Image out(h, w);
  for (int k = 0; k < h; ++k)
    for (int c = 0; c < w; ++c) {
      double s = 0.0;
      for (int r = 0; r < h; ++r) s += coef(bh, h, k, r) * tmp.at(r, c);
      out.at(k, c) = s;
    }
  return out;
}

}  // namespace

Image Dct2d(const Image &roi) { return Separable(roi, true); }

Image InverseDct2d(const Image &coefficients) {
  return Separable(coefficients, false);
}

std::vector<std::pair<int, int>> ZigZagOrder(int height, int width) {
  std::vector<std::pair<int, int>> order;
  order.reserve(static_cast<std::size_t>(height) * width);
  for (int s = 0; s <= height + width - 2; ++s) {
    const int r_lo = std::max(0, s - (width - 1));
    const int r_hi = std::min(s, height - 1);
    if (s % 2 == 1) {
      for (int r = r_lo; r <= r_hi; ++r) order.emplace_back(r, s - r);
    } else {
      for (int r = r_hi; r >= r_lo; --r) order.emplace_back(r, s - r);
    }
  }
  return order;
}

std::vector<double> SelectCoefficients(const Image &grid, int k) {
  const int total = grid.height * grid.width;
  if (k < 0 || k > total)
    throw Error("coefficient count " + std::to_string(k) + " outside [0, " +
                std::to_string(total) + "]");
  const auto order = ZigZagOrder(grid.height, grid.width);
  std::vector<double> out(k);
  for (int i = 0; i < k; ++i) out[i] = grid.at(order[i].first, order[i].second);
  return out;
}

Matrix TemporalFuse(const Matrix &frames, int window) {
  if (window < 1 || window % 2 == 0)
    throw Error("temporal window must be odd and >= 1, got " +
                std::to_string(window));
  if (frames.rows == 0) throw Error("temporal fusion of an empty sequence");
  const long half = (window - 1) / 2;
  const long last = static_cast<long>(frames.rows) - 1;
  Matrix out(frames.rows, frames.cols * window);
  for (std::size_t t = 0; t < frames.rows; ++t) {
    double *dst = out.Row(t);
    for (long o = -half; o <= half; ++o) {
      const long src = std::clamp(static_cast<long>(t) + o, 0L, last);
      std::copy_n(frames.Row(src), frames.cols, dst);
      dst += frames.cols;
    }
  }
  return out;
}

Standardizer Standardizer::Fit(std::span<const Matrix> training_parts) {
  if (training_parts.empty()) throw Error("no training data for standardization");
  const std::size_t d = training_parts.front().cols;
  std::vector<double> sum(d, 0.0);
  std::size_t n = 0;
  for (const Matrix &m : training_parts) {
    if (m.cols != d) throw Error("inconsistent feature dimension in training data");
    for (std::size_t r = 0; r < m.rows; ++r)
      for (std::size_t c = 0; c < d; ++c) sum[c] += m(r, c);
    n += m.rows;
  }
  if (n == 0) throw Error("no training frames for standardization");
  Standardizer s;
  s.mean.resize(d);
  for (std::size_t c = 0; c < d; ++c) s.mean[c] = sum[c] / n;
  // Second pass about the mean keeps the variance accurate.
  std::vector<double> ss(d, 0.0);
  for (const Matrix &m : training_parts)
    for (std::size_t r = 0; r < m.rows; ++r)
      for (std::size_t c = 0; c < d; ++c) {
        const double dev = m(r, c) - s.mean[c];
        ss[c] += dev * dev;
      }
  s.scale.resize(d);
  for (std::size_t c = 0; c < d; ++c) {
    const double sd = std::sqrt(ss[c] / n);
    s.scale[c] = sd > 0.0 ? sd : 1.0;
  }
  return s;
}

Matrix Standardizer::Apply(const Matrix &frames) const {
  if (frames.cols != mean.size())
    throw Error("standardizer dimension " + std::to_string(mean.size()) +
                " does not match features of dimension " +
                std::to_string(frames.cols));
  Matrix out(frames.rows, frames.cols);
  for (std::size_t r = 0; r < frames.rows; ++r)
    for (std::size_t c = 0; c < frames.cols; ++c)
      out(r, c) = (frames(r, c) - mean[c]) / scale[c];
  return out;
}

Matrix FuseEarly(std::span<const Matrix> parts,
                 std::span<const Standardizer> stats) {
  if (parts.empty()) throw Error("early fusion needs at least one part");
  if (parts.size() != stats.size())
    throw Error("early fusion: one standardizer per part required");
  const std::size_t n = parts.front().rows;
  std::size_t dim = 0;
  for (const Matrix &p : parts) {
    if (p.rows != n)
      throw Error("early fusion: part length mismatch (" + std::to_string(p.rows) +
                  " vs " + std::to_string(n) + " frames)");
    dim += p.cols;
  }
  Matrix out(n, dim);
  std::size_t offset = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    Matrix z = stats[k].Apply(parts[k]);
    for (std::size_t r = 0; r < n; ++r)
      std::copy_n(z.Row(r), z.cols, out.Row(r) + offset);
    offset += z.cols;
  }
  return out;
}

}  // namespace lrc
