// src/hmm.cc

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

#include "lrc/hmm.h"

#include <cmath>
#include <limits>

namespace lrc {

namespace {

void CheckStochastic(const double *row, std::size_t n, const char *what) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(row[i] >= 0.0)) throw Error(std::string(what) + " has a negative entry");
    s += row[i];
  }
  if (std::abs(s - 1.0) > 1e-9)
    throw Error(std::string(what) + " row sums to " + std::to_string(s));
}

void NormalizeRow(double *row, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += row[i];
  for (std::size_t i = 0; i < n; ++i) row[i] = s > 0.0 ? row[i] / s : 1.0 / n;
}

}  // namespace

void HmmModel::Validate() const {
  const std::size_t s = transitions.rows;
  if (transitions.cols != s || initial.size() != s || emissions.rows != s)
    throw Error("HMM tables have inconsistent sizes");
  if (emissions.cols == 0) throw Error("HMM has no visemes");
  CheckStochastic(initial.data(), s, "initial distribution");
  for (std::size_t i = 0; i < s; ++i) {
    CheckStochastic(transitions.Row(i), s, "transition matrix");
    CheckStochastic(emissions.Row(i), emissions.cols, "emission table");
  }
}

HmmModel TrainHmm(std::span<const std::vector<int>> phoneme_sequences,
                  std::span<const std::vector<int>> predicted_visemes,
                  int states, int visemes, double alpha) {
  if (phoneme_sequences.empty()) throw Error("HMM: empty training set");
  if (phoneme_sequences.size() != predicted_visemes.size())
    throw Error("HMM: one predicted viseme sequence per label sequence required");
  if (!(alpha >= 0.0)) throw Error("HMM: smoothing alpha must be >= 0");
  HmmModel hmm;
  hmm.alpha = alpha;
  hmm.transitions = Matrix(states, states, alpha);
  hmm.initial.assign(states, alpha);
  hmm.emissions = Matrix(states, visemes, alpha);
  for (std::size_t k = 0; k < phoneme_sequences.size(); ++k) {
    const auto &labels = phoneme_sequences[k];
    const auto &pred = predicted_visemes[k];
    if (labels.size() != pred.size())
      throw Error("HMM: label/prediction length mismatch in sequence " +
                  std::to_string(k));
    if (labels.empty()) continue;
    for (std::size_t t = 0; t < labels.size(); ++t) {
      if (labels[t] < 0 || labels[t] >= states || pred[t] < 0 || pred[t] >= visemes)
        throw Error("HMM: label out of range in sequence " + std::to_string(k));
      hmm.emissions(labels[t], pred[t]) += 1.0;
      if (t > 0) hmm.transitions(labels[t - 1], labels[t]) += 1.0;
    }
    hmm.initial[labels.front()] += 1.0;
  }
  NormalizeRow(hmm.initial.data(), states);
  for (int s = 0; s < states; ++s) {
    // A state never left in training keeps its last frame: self-loop.
    double out = 0.0;
    for (int t = 0; t < states; ++t) out += hmm.transitions(s, t);
    if (out == 0.0) hmm.transitions(s, s) = 1.0;
    NormalizeRow(hmm.transitions.Row(s), states);
    NormalizeRow(hmm.emissions.Row(s), visemes);
  }
  return hmm;
}

Matrix LogEmissions(const HmmModel &hmm, const Matrix &frame_scores) {
  const std::size_t s_count = hmm.transitions.rows, v_count = hmm.emissions.cols;
  if (frame_scores.cols != v_count)
    throw Error("frame scores have " + std::to_string(frame_scores.cols) +
                " visemes, HMM expects " + std::to_string(v_count));
  Matrix out(frame_scores.rows, s_count);
  for (std::size_t t = 0; t < frame_scores.rows; ++t) {
    const double *o = frame_scores.Row(t);
    for (std::size_t s = 0; s < s_count; ++s) {
      const double *e = hmm.emissions.Row(s);
      double b = 0.0;
      for (std::size_t v = 0; v < v_count; ++v) b += e[v] * o[v];
      out(t, s) = std::log(b > kEmissionFloor ? b : kEmissionFloor);
    }
  }
  return out;
}

ViterbiResult ViterbiDecode(const HmmModel &hmm, const Matrix &frame_scores) {
  const std::size_t T = frame_scores.rows, S = hmm.transitions.rows;
  if (T == 0) throw Error("Viterbi: empty frame sequence");
  if (S == 0) throw Error("Viterbi: HMM has no states");
  const Matrix log_b = LogEmissions(hmm, frame_scores);
  // Transposed so the inner loop over predecessors is contiguous.
  Matrix log_a_t(S, S);
  for (std::size_t r = 0; r < S; ++r)
    for (std::size_t s = 0; s < S; ++s) log_a_t(s, r) = std::log(hmm.transitions(r, s));

  std::vector<double> delta(S), next(S);
  std::vector<int> back(T * S, 0);
  for (std::size_t s = 0; s < S; ++s)
    delta[s] = std::log(hmm.initial[s]) + log_b(0, s);
  for (std::size_t t = 1; t < T; ++t) {
    for (std::size_t s = 0; s < S; ++s) {
      const double *into = log_a_t.Row(s);
      double best = -std::numeric_limits<double>::infinity();
      int arg = 0;
      for (std::size_t r = 0; r < S; ++r) {
        const double v = delta[r] + into[r];
        if (v > best) {
          best = v;
          arg = static_cast<int>(r);
        }
      }
      next[s] = best + log_b(t, s);
      back[t * S + s] = arg;
    }
    delta.swap(next);
  }
  ViterbiResult res;
  res.log_prob = -std::numeric_limits<double>::infinity();
  int last = 0;
  for (std::size_t s = 0; s < S; ++s)
    if (delta[s] > res.log_prob) {
      res.log_prob = delta[s];
      last = static_cast<int>(s);
    }
  res.path.resize(T);
  res.path[T - 1] = last;
  for (std::size_t t = T - 1; t > 0; --t) res.path[t - 1] = back[t * S + res.path[t]];
  return res;
}

double PathLogProb(const HmmModel &hmm, const Matrix &frame_scores,
                   std::span<const int> path) {
  if (path.size() != frame_scores.rows)
    throw Error("path length does not match frame count");
  if (path.empty()) return 0.0;
  const Matrix log_b = LogEmissions(hmm, frame_scores);
  double lp = std::log(hmm.initial[path[0]]) + log_b(0, path[0]);
  for (std::size_t t = 1; t < path.size(); ++t)
    lp = lp + std::log(hmm.transitions(path[t - 1], path[t])) + log_b(t, path[t]);
  return lp;
}

}  // namespace lrc
