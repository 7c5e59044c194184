// include/lrc/common.h

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

#ifndef LRC_COMMON_H_
#define LRC_COMMON_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lrc {

/// All recoverable failures in the library are reported with this type.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string &what) : std::runtime_error(what) {}
};

/// Row-major dense matrix of doubles.  Used for frame sequences (rows are
/// frames) and small model tables.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double &operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const {
    return data[r * cols + c];
  }
  double *Row(std::size_t r) { return data.data() + r * cols; }
  const double *Row(std::size_t r) const { return data.data() + r * cols; }

  bool operator==(const Matrix &) const = default;
};

// 64-bit FNV-1a.
std::uint64_t Fnv1a64(std::string_view bytes,
                      std::uint64_t seed = 0xcbf29ce484222325ULL);

// 16 lowercase hex digits.
std::string HexFingerprint(std::uint64_t value);

// Fingerprint of a string payload, hex encoded.
std::string Fingerprint(std::string_view payload);

/// Writes `contents` to `path` through a temporary sibling file and a rename,
/// so readers never observe a partially written artifact.
void WriteFileAtomic(const std::filesystem::path &path,
                     std::string_view contents);

std::string ReadFile(const std::filesystem::path &path);

/// Runs fn(i) for i in [0, n) on up to `jobs` threads.  Every index is handled
/// exactly once; the first exception thrown by any worker is rethrown.
void ParallelFor(std::size_t n, int jobs,
                 const std::function<void(std::size_t)> &fn);

/// Seeded generator with platform-independent output: the engine is
/// mt19937_64 and every transform below is implemented here rather than via
/// the implementation-defined <random> distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t NextU64();
  // [0, 1)
  double Uniform01();
  // Inclusive range.
  std::int64_t UniformInt(std::int64_t lo, std::int64_t hi);
  double Normal();
  template <typename T>
  void Shuffle(std::vector<T> &v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      auto j = static_cast<std::size_t>(UniformInt(0, static_cast<std::int64_t>(i) - 1));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Derives an independent seed for a sub-stream (splitmix64 of seed ^ stream).
std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t stream);

std::vector<std::string> SplitWhitespace(std::string_view line);
std::string_view Trim(std::string_view s);

// Little-endian binary serialization helpers for the model and feature files.
class BinaryWriter {
 public:
  void U32(std::uint32_t v);
  void U64(std::uint64_t v);
  void F32(float v);
  void F64(double v);
  void Str(std::string_view s);
  void Bytes(std::string_view s) { buf_.append(s); }
  const std::string &buffer() const { return buf_; }

 private:
  std::string buf_;
};

class BinaryReader {
 public:
  BinaryReader(std::string_view data, std::string context)
      : data_(data), context_(std::move(context)) {}
  std::uint32_t U32();
  std::uint64_t U64();
  float F32();
  double F64();
  std::string Str();
  std::string_view Bytes(std::size_t n);
  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  std::string_view data_;
  std::size_t pos_ = 0;
  std::string context_;
};

}  // namespace lrc

#endif  // LRC_COMMON_H_
