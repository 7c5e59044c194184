// include/lrc/feature-io.h

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

// Frame-matrix container used for feature, external-descriptor, video and
// landmark files.  All integers and floats are little-endian.
//
//   offset  size  field
//   0       4     magic "LRCF"
//   4       4     u32 version (1)
//   8       4     u32 flags (bit 0 dct, bit 1 temporal, bit 2 external,
//                            bit 3 image, bit 4 landmarks)
//   12      4     u32 dimension (floats per frame)
//   16      4     u32 frame count
//   20      4     u32 length L of the layout string
//   24      L     layout, UTF-8, e.g. "dct:64@w3,external:16@w3"
//   24+L    4     u32 length F of the fingerprint string
//   28+L    F     fingerprint, 16 hex digits or empty
//   28+L+F  4*D*N frames, row-major float32

#ifndef LRC_FEATURE_IO_H_
#define LRC_FEATURE_IO_H_

#include <cstdint>
#include <filesystem>
#include <string>

#include "lrc/common.h"

namespace lrc {

enum FeatureFlags : std::uint32_t {
  kFeatureDct = 1u << 0,
  kFeatureTemporal = 1u << 1,
  kFeatureExternal = 1u << 2,
  kFeatureImage = 1u << 3,
  kFeatureLandmarks = 1u << 4,
};

struct FeatureFile {
  std::uint32_t flags = 0;
  std::string layout;
  std::string fingerprint;
  Matrix frames;  // rows = frames, cols = dimension
};

std::string EncodeFeatureFile(const FeatureFile &file);
FeatureFile DecodeFeatureFile(std::string_view bytes, const std::string &name);

void WriteFeatureFile(const std::filesystem::path &path, const FeatureFile &file);
FeatureFile ReadFeatureFile(const std::filesystem::path &path);

}  // namespace lrc

#endif  // LRC_FEATURE_IO_H_
