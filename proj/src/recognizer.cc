// src/recognizer.cc

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

#include "lrc/recognizer.h"

#include "lrc/words.h"

namespace lrc {

RecognizerModel TrainRecognizer(std::span<const TrainingUtterance> training,
                                const VisemeMap &visemes,
                                const TrainOptions &options) {
  if (training.empty()) throw Error("no training utterances");
  std::size_t rows = 0, cols = training.front().features->cols;
  for (const auto &u : training) {
    if (u.features->rows != u.labels->size())
      throw Error("training utterance has " + std::to_string(u.features->rows) +
                  " feature frames but " + std::to_string(u.labels->size()) +
                  " labels");
    if (u.features->cols != cols) throw Error("inconsistent feature dimension");
    rows += u.features->rows;
  }
  Matrix stacked(rows, cols);
  std::vector<int> labels;
  labels.reserve(rows);
  std::size_t r = 0;
  for (const auto &u : training) {
    std::copy(u.features->data.begin(), u.features->data.end(),
              stacked.data.begin() + static_cast<std::ptrdiff_t>(r * cols));
    labels.insert(labels.end(), u.labels->begin(), u.labels->end());
    r += u.features->rows;
  }

  RecognizerModel model;
  model.visemes = visemes;
  model.lda = TrainLdaBank(stacked, labels, visemes, options.lambda);

  std::vector<std::vector<int>> label_seqs, predicted;
  for (const auto &u : training) {
    label_seqs.emplace_back(u.labels->begin(), u.labels->end());
    std::vector<int> pred(u.features->rows);
    for (std::size_t t = 0; t < u.features->rows; ++t)
      pred[t] = model.lda.Classify({u.features->Row(t), cols});
    predicted.push_back(std::move(pred));
  }
  model.hmm = TrainHmm(label_seqs, predicted, visemes.classes(),
                       visemes.viseme_count, options.alpha);
  return model;
}

DecodedUtterance Decode(const RecognizerModel &model, const Matrix &features,
                        const Lexicon &lexicon) {
  if (features.rows == 0) throw Error("cannot decode an empty utterance");
  DecodedUtterance out;
  out.viseme_scores = model.lda.ScoreFrames(features);
  ViterbiResult v = ViterbiDecode(model.hmm, out.viseme_scores);
  out.phonemes = std::move(v.path);
  out.log_prob = v.log_prob;
  out.words = AssembleWords(out.phonemes, lexicon);
  return out;
}

namespace {
constexpr std::string_view kMagic = "LRCM";
constexpr std::string_view kTrailer = "END.";
constexpr std::uint32_t kVersion = 1;
}  // namespace

std::string EncodeModel(const RecognizerModel &m) {
  BinaryWriter w;
  w.Bytes(kMagic);
  w.U32(kVersion);
  w.Str(m.fingerprint);
  w.Str(m.features_fingerprint);
  w.Str(m.visemes.fingerprint);
  const auto c = static_cast<std::uint32_t>(m.visemes.classes());
  const auto v = static_cast<std::uint32_t>(m.lda.visemes());
  const auto d = static_cast<std::uint32_t>(m.lda.dim());
  w.U32(c);
  w.U32(v);
  w.U32(d);
  for (int a : m.visemes.assignment) w.U32(static_cast<std::uint32_t>(a));
  w.U32(static_cast<std::uint32_t>(m.visemes.history.size()));
  for (auto [a, b] : m.visemes.history) {
    w.U32(static_cast<std::uint32_t>(a));
    w.U32(static_cast<std::uint32_t>(b));
  }
  w.F64(m.lda.lambda);
  for (double x : m.lda.directions.data) w.F64(x);
  for (double x : m.lda.bias) w.F64(x);
  w.F64(m.hmm.alpha);
  for (double x : m.hmm.initial) w.F64(x);
  for (double x : m.hmm.transitions.data) w.F64(x);
  for (double x : m.hmm.emissions.data) w.F64(x);
  w.Bytes(kTrailer);
  return w.buffer();
}

RecognizerModel DecodeModel(std::string_view bytes, const std::string &name) {
  BinaryReader r(bytes, "model file " + name);
  if (r.Bytes(4) != kMagic) throw Error("not a model file: " + name);
  if (auto ver = r.U32(); ver != kVersion)
    throw Error("unsupported model version " + std::to_string(ver) + " in " + name);
  RecognizerModel m;
  m.fingerprint = r.Str();
  m.features_fingerprint = r.Str();
  const std::string map_fingerprint = r.Str();
  const std::uint32_t c = r.U32(), v = r.U32(), d = r.U32();
  if (c == 0 || v == 0 || v > c || c > 4096 || d > (1u << 20))
    throw Error("corrupt model header in " + name);
  std::vector<int> assignment(c);
  for (auto &a : assignment) a = static_cast<int>(r.U32());
  const std::uint32_t merges = r.U32();
  if (merges >= c) throw Error("corrupt merge history in " + name);
  std::vector<std::pair<int, int>> history(merges);
  for (auto &h : history) {
    h.first = static_cast<int>(r.U32());
    h.second = static_cast<int>(r.U32());
  }
  m.visemes = VisemeMap::Replay(static_cast<int>(c), history);
  if (m.visemes.assignment != assignment || m.visemes.viseme_count != static_cast<int>(v))
    throw Error("viseme map in " + name + " does not match its merge history");
  m.visemes.fingerprint = map_fingerprint;

  m.lda.lambda = r.F64();
  m.lda.directions = Matrix(v, d);
  for (double &x : m.lda.directions.data) x = r.F64();
  m.lda.bias.resize(v);
  for (double &x : m.lda.bias) x = r.F64();
  m.hmm.alpha = r.F64();
  m.hmm.initial.resize(c);
  for (double &x : m.hmm.initial) x = r.F64();
  m.hmm.transitions = Matrix(c, c);
  for (double &x : m.hmm.transitions.data) x = r.F64();
  m.hmm.emissions = Matrix(c, v);
  for (double &x : m.hmm.emissions.data) x = r.F64();
  if (r.Bytes(4) != kTrailer || r.remaining() != 0)
    throw Error("corrupt model trailer in " + name);
  m.hmm.Validate();
  return m;
}

void WriteModel(const std::filesystem::path &path, const RecognizerModel &model) {
  WriteFileAtomic(path, EncodeModel(model));
}

RecognizerModel ReadModel(const std::filesystem::path &path) {
  if (!std::filesystem::exists(path))
    throw Error("missing model: " + path.string());
  return DecodeModel(ReadFile(path), path.string());
}

}  // namespace lrc
