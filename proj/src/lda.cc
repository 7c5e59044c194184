// src/lda.cc

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

#include "lrc/lda.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace lrc {

std::vector<double> LdaBank::Projections(std::span<const double> feature) const {
  if (feature.size() != directions.cols)
    throw Error("feature dimension " + std::to_string(feature.size()) +
                " does not match LDA bank dimension " +
                std::to_string(directions.cols));
  std::vector<double> out(directions.rows);
  for (std::size_t v = 0; v < directions.rows; ++v) {
    const double *w = directions.Row(v);
    double s = bias[v];
    for (std::size_t d = 0; d < directions.cols; ++d) s += w[d] * feature[d];
    out[v] = s;
  }
  return out;
}

std::vector<double> LdaBank::Scores(std::span<const double> feature) const {
  std::vector<double> p = Projections(feature);
  if (p.empty()) return p;
  const double top = *std::max_element(p.begin(), p.end());
  double z = 0.0;
  for (double &x : p) {
    x = std::exp(x - top);
    z += x;
  }
  for (double &x : p) x /= z;
  return p;
}

int LdaBank::Classify(std::span<const double> feature) const {
  // Softmax is monotone, so the projections decide.
  std::vector<double> p = Projections(feature);
  return static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
}

Matrix LdaBank::ScoreFrames(const Matrix &features) const {
  Matrix out(features.rows, directions.rows);
  for (std::size_t t = 0; t < features.rows; ++t) {
    auto s = Scores({features.Row(t), features.cols});
    std::copy(s.begin(), s.end(), out.Row(t));
  }
  return out;
}

LdaBank TrainLdaBank(const Matrix &features, std::span<const int> labels,
                     int classes, std::optional<double> lambda) {
  using Eigen::MatrixXd;
  using Eigen::VectorXd;
  const std::size_t n = features.rows, dim = features.cols;
  if (labels.size() != n)
    throw Error("LDA: " + std::to_string(labels.size()) + " labels for " +
                std::to_string(n) + " frames");
  if (classes < 1) throw Error("LDA: need at least one class");
  if (lambda && *lambda < 0.0) throw Error("LDA: lambda must be >= 0");

  std::vector<std::size_t> count(classes, 0);
  MatrixXd sums = MatrixXd::Zero(classes, dim);
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                 Eigen::RowMajor>>
      x(features.data.data(), n, dim);
  for (std::size_t t = 0; t < n; ++t) {
    const int y = labels[t];
    if (y < 0 || y >= classes) throw Error("LDA: label out of range");
    ++count[y];
    sums.row(y) += x.row(t);
  }
  for (int v = 0; v < classes; ++v)
    if (count[v] < 2)
      throw Error("LDA: class " + std::to_string(v) + " has " +
                  std::to_string(count[v]) +
                  " training frames (need at least 2)");

  MatrixXd means(classes, dim);
  for (int v = 0; v < classes; ++v) means.row(v) = sums.row(v) / count[v];
  const VectorXd total = sums.colwise().sum().transpose();

  MatrixXd centered(n, dim);
  for (std::size_t t = 0; t < n; ++t) centered.row(t) = x.row(t) - means.row(labels[t]);
  MatrixXd scatter = (centered.transpose() * centered) / static_cast<double>(n);

  double ridge = lambda ? *lambda : 1e-3 * scatter.trace() / static_cast<double>(dim);
  if (!lambda && ridge == 0.0) {
    // Noiseless classes: scale the ridge by the spread of the class means.
    const VectorXd grand = total / static_cast<double>(n);
    double spread = 0.0;
    for (std::size_t t = 0; t < n; ++t) spread += (x.row(t).transpose() - grand).squaredNorm();
    ridge = 1e-3 * spread / static_cast<double>(n) / static_cast<double>(dim);
    if (ridge == 0.0) ridge = 1e-3;
  }
  MatrixXd reg = scatter;
  reg.diagonal().array() += ridge;
  Eigen::LDLT<MatrixXd> ldlt(reg);
  // LDLT::rcond() ignores zero pivots; compare the pivots directly.
  const VectorXd pivots = ldlt.vectorD().cwiseAbs();
  const bool singular = ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
                        !(pivots.minCoeff() > 1e-12 * pivots.maxCoeff());
  if (singular)
    throw Error("LDA: within-class scatter is singular with lambda = " +
                std::to_string(ridge) + "; use lambda > 0");

  LdaBank bank;
  bank.lambda = ridge;
  bank.directions = Matrix(classes, dim);
  bank.bias.assign(classes, 0.0);
  for (int v = 0; v < classes; ++v) {
    const std::size_t rest = n - count[v];
    if (rest == 0) continue;  // single class: no discriminant
    const VectorXd mu_v = means.row(v).transpose();
    const VectorXd mu_rest = (total - sums.row(v).transpose()) / rest;
    VectorXd w = ldlt.solve(mu_v - mu_rest);
    const double norm2 = w.dot(reg * w);
    if (!(norm2 > 0.0)) continue;
    w /= std::sqrt(norm2);
    for (std::size_t d = 0; d < dim; ++d) bank.directions(v, d) = w[d];
    bank.bias[v] = -0.5 * w.dot(mu_v + mu_rest);
  }
  return bank;
}

LdaBank TrainLdaBank(const Matrix &features, std::span<const int> phoneme_labels,
                     const VisemeMap &map, std::optional<double> lambda) {
  std::vector<int> visemes(phoneme_labels.size());
  for (std::size_t t = 0; t < phoneme_labels.size(); ++t) {
    const int p = phoneme_labels[t];
    if (p < 0 || p >= map.classes()) throw Error("LDA: phoneme label out of range");
    visemes[t] = map.assignment[p];
  }
  return TrainLdaBank(features, visemes, map.viseme_count, lambda);
}

FrameClassifierTrainer MakeLdaTrainer(std::optional<double> lambda) {
  return [lambda](const Matrix &train, std::span<const int> labels, int classes,
                  const Matrix &eval) {
    const LdaBank bank = TrainLdaBank(train, labels, classes, lambda);
    std::vector<int> out(eval.rows);
    for (std::size_t t = 0; t < eval.rows; ++t)
      out[t] = bank.Classify({eval.Row(t), eval.cols});
    return out;
  };
}

}  // namespace lrc
