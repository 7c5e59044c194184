// src/feature-io.cc

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

#include "lrc/feature-io.h"

#include <cmath>

namespace lrc {

namespace {
constexpr std::string_view kMagic = "LRCF";
constexpr std::uint32_t kVersion = 1;
}  // namespace

std::string EncodeFeatureFile(const FeatureFile &file) {
  BinaryWriter w;
  w.Bytes(kMagic);
  w.U32(kVersion);
  w.U32(file.flags);
  w.U32(static_cast<std::uint32_t>(file.frames.cols));
  w.U32(static_cast<std::uint32_t>(file.frames.rows));
  w.Str(file.layout);
  w.Str(file.fingerprint);
  for (double v : file.frames.data) w.F32(static_cast<float>(v));
  return w.buffer();
}

FeatureFile DecodeFeatureFile(std::string_view bytes, const std::string &name) {
  BinaryReader r(bytes, "feature file " + name);
  if (r.Bytes(4) != kMagic) throw Error("not a feature file: " + name);
  if (std::uint32_t v = r.U32(); v != kVersion)
    throw Error("unsupported feature file version " + std::to_string(v) +
                " in " + name);
  FeatureFile f;
  f.flags = r.U32();
  const std::uint32_t dim = r.U32();
  const std::uint32_t count = r.U32();
  f.layout = r.Str();
  f.fingerprint = r.Str();
  const std::size_t expected = static_cast<std::size_t>(dim) * count * 4;
  if (r.remaining() != expected)
    throw Error("feature file " + name + " holds " +
                std::to_string(r.remaining()) + " payload bytes, expected " +
                std::to_string(expected));
  f.frames = Matrix(count, dim);
  for (double &v : f.frames.data) {
    v = r.F32();
    if (!std::isfinite(v)) throw Error("non-finite value in " + name);
  }
  return f;
}

void WriteFeatureFile(const std::filesystem::path &path, const FeatureFile &file) {
  WriteFileAtomic(path, EncodeFeatureFile(file));
}

FeatureFile ReadFeatureFile(const std::filesystem::path &path) {
  return DecodeFeatureFile(ReadFile(path), path.string());
}

}  // namespace lrc
