// include/lrc/features.h

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

// Appearance features: mouth ROI normalization, orthonormal 2-D DCT-II,
// zig-zag coefficient selection, temporal windowing and early fusion of
// standardized feature streams.

#ifndef LRC_FEATURES_H_
#define LRC_FEATURES_H_

#include <cstdint>
#include <span>
#include <vector>

#include "lrc/common.h"

namespace lrc {

/// Grayscale image, row-major.  Also used for ROIs and DCT coefficient grids.
struct Image {
  int height = 0;
  int width = 0;
  std::vector<double> pixels;

  Image() = default;
  Image(int h, int w, double fill = 0.0)
      : height(h), width(w), pixels(static_cast<std::size_t>(h) * w, fill) {}
  double &at(int r, int c) { return pixels[static_cast<std::size_t>(r) * width + c]; }
  double at(int r, int c) const {
    return pixels[static_cast<std::size_t>(r) * width + c];
  }
};

struct Point {
  double x = 0.0;  // column
  double y = 0.0;  // row
};

struct RoiConfig {
  int height = 32;
  int width = 32;
  // Fraction of the landmark box extent added on each side.
  double margin = 0.0;
  // Raw intensities are divided by this before clamping to [0,1].
  double intensity_scale = 1.0;
};

struct RoiFrame {
  Image roi;
  std::int64_t source_frame = 0;
};

/// Crops the landmark bounding box (plus margin) and resamples it bilinearly
/// onto the configured grid.  Box corners map onto the outermost ROI samples,
/// so a box spanning exactly height x width pixels reproduces them unchanged.
RoiFrame NormalizeRoi(const Image &image, std::span<const Point> landmarks,
                      const RoiConfig &config, std::int64_t source_frame = 0);

/// Orthonormal type-II DCT over both axes.
Image Dct2d(const Image &roi);
/// Inverse of Dct2d (orthonormal DCT-III).
Image InverseDct2d(const Image &coefficients);

/// (row, col) visiting order of the JPEG zig-zag scan over an h x w grid.
std::vector<std::pair<int, int>> ZigZagOrder(int height, int width);

/// First k coefficients in zig-zag order, starting at DC.
std::vector<double> SelectCoefficients(const Image &grid, int k);

/// Output frame t concatenates input frames t-(w-1)/2 .. t+(w-1)/2, with the
/// first and last frames replicated past the edges.
Matrix TemporalFuse(const Matrix &frames, int window);

/// Per-column z-score statistics.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;  // population standard deviation, 1 if constant

  static Standardizer Fit(std::span<const Matrix> training_parts);
  Matrix Apply(const Matrix &frames) const;
};

/// Standardizes each part with its statistics and concatenates per frame.
Matrix FuseEarly(std::span<const Matrix> parts,
                 std::span<const Standardizer> stats);

}  // namespace lrc

#endif  // LRC_FEATURES_H_
