// Copyright 2026 The Hintrank Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hintrank/tensor_kernel.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "hintrank/status.h"

namespace hintrank::nn {
namespace {

[[noreturn]] void Mismatch(const std::string& what) {
  throw Error(ErrorCode::kDimensionMismatch, what);
}

void CheckForest(const Forest& forest, const Matrix& x, const char* op) {
  if (x.cols() != forest.num_nodes()) {
    Mismatch(std::string(op) + ": feature matrix has " + std::to_string(x.cols()) +
             " columns for " + std::to_string(forest.num_nodes()) + " nodes");
  }
}

// Adds the columns of `g` into `out` at the given indices; -1 is skipped.
void ScatterAdd(const Matrix& g, std::span<const int> index, Matrix* out) {
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    if (index[j] >= 0) out->col(index[j]) += g.col(j);
  }
}

}  // namespace

TreeConvLayer::TreeConvLayer(int in_dim, int out_dim)
    : self(Matrix::Zero(out_dim, in_dim)),
      left(Matrix::Zero(out_dim, in_dim)),
      right(Matrix::Zero(out_dim, in_dim)),
      bias(Vector::Zero(out_dim)) {}

std::int64_t TreeConvLayer::ParamCount() const {
  return self.size() + left.size() + right.size() + bias.size();
}

LinearLayer::LinearLayer(int in_dim, int out_dim)
    : weight(Matrix::Zero(out_dim, in_dim)), bias(Vector::Zero(out_dim)) {}

std::int64_t LinearLayer::ParamCount() const { return weight.size() + bias.size(); }

ForestBatch PackForest(std::span<const EncodedTree* const> trees) {
  ForestBatch batch;
  Forest& f = batch.forest;
  int total = 0;
  for (const EncodedTree* t : trees) total += t->non_null_count();
  batch.features.resize(kNodeFeatureDim, total);
  f.left.reserve(total);
  f.right.reserve(total);
  f.tree_begin.reserve(trees.size() + 1);
  f.tree_begin.push_back(0);

  std::vector<int> column;
  for (const EncodedTree* t : trees) {
    const int base = f.num_nodes();
    column.assign(t->size(), -1);
    int next = base;
    for (int i = 0; i < t->size(); ++i) {
      if (!t->is_null[i]) column[i] = next++;
    }
    if (next == base) throw Error(ErrorCode::kEmptyTree, "tree has no plan nodes");
    for (int i = 0; i < t->size(); ++i) {
      if (t->is_null[i]) continue;
      const int c = column[i];
      for (int k = 0; k < kNodeFeatureDim; ++k) batch.features(k, c) = t->features[i][k];
      f.left.push_back(t->left[i] >= 0 ? column[t->left[i]] : -1);
      f.right.push_back(t->right[i] >= 0 ? column[t->right[i]] : -1);
    }
    f.tree_begin.push_back(f.num_nodes());
  }
  return batch;
}

Matrix Gather(const Matrix& x, std::span<const int> index) {
  Matrix out(x.rows(), static_cast<Eigen::Index>(index.size()));
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    if (index[j] >= 0) {
      out.col(j) = x.col(index[j]);
    } else {
      out.col(j).setZero();
    }
  }
  return out;
}

Matrix TreeConvForward(const TreeConvLayer& layer, const Forest& forest,
                       const Matrix& x) {
  CheckForest(forest, x, "tree_conv_forward");
  if (x.rows() != layer.in_dim()) {
    Mismatch("tree_conv_forward: input dim " + std::to_string(x.rows()) +
             " != layer input dim " + std::to_string(layer.in_dim()));
  }
  Matrix out = layer.self * x;
  out.noalias() += layer.left * Gather(x, forest.left);
  out.noalias() += layer.right * Gather(x, forest.right);
  out.colwise() += layer.bias;
  return out;
}

TreeConvGrads TreeConvBackward(const TreeConvLayer& layer, const Forest& forest,
                               const Matrix& x, const Matrix& upstream) {
  CheckForest(forest, x, "tree_conv_backward");
  if (upstream.rows() != layer.out_dim() || upstream.cols() != x.cols() ||
      x.rows() != layer.in_dim()) {
    Mismatch("tree_conv_backward: gradient shape does not match the layer");
  }
  const Matrix xl = Gather(x, forest.left);
  const Matrix xr = Gather(x, forest.right);
  TreeConvGrads g;
  g.self.noalias() = upstream * x.transpose();
  g.left.noalias() = upstream * xl.transpose();
  g.right.noalias() = upstream * xr.transpose();
  g.bias = upstream.rowwise().sum();
  g.input.noalias() = layer.self.transpose() * upstream;
  ScatterAdd(layer.left.transpose() * upstream, forest.left, &g.input);
  ScatterAdd(layer.right.transpose() * upstream, forest.right, &g.input);
  return g;
}

Matrix LeakyRelu(const Matrix& x, double slope) {
  return x.unaryExpr([slope](double v) { return v > 0.0 ? v : slope * v; });
}

Matrix LeakyReluBackward(const Matrix& pre_activation, const Matrix& upstream,
                         double slope) {
  if (pre_activation.rows() != upstream.rows() ||
      pre_activation.cols() != upstream.cols()) {
    Mismatch("leaky_relu_backward: shape mismatch");
  }
  return upstream.binaryExpr(pre_activation, [slope](double g, double v) {
    return v > 0.0 ? g : slope * g;
  });
}

PoolResult DynamicMaxPool(const Forest& forest, const Matrix& x) {
  CheckForest(forest, x, "dynamic_max_pool");
  const int channels = static_cast<int>(x.rows());
  PoolResult r;
  r.pooled.resize(channels, forest.num_trees());
  r.argmax.resize(channels, forest.num_trees());
  for (int t = 0; t < forest.num_trees(); ++t) {
    const int begin = forest.tree_begin[t];
    const int end = forest.tree_begin[t + 1];
    if (begin == end) throw Error(ErrorCode::kEmptyTree, "cannot pool an empty tree");
    for (int c = 0; c < channels; ++c) {
      int best = begin;
      for (int n = begin + 1; n < end; ++n) {
        if (x(c, n) > x(c, best)) best = n;
      }
      r.pooled(c, t) = x(c, best);
      r.argmax(c, t) = best;
    }
  }
  return r;
}

Matrix DynamicMaxPoolBackward(const PoolResult& pool, const Matrix& upstream,
                              int num_nodes) {
  if (upstream.rows() != pool.pooled.rows() || upstream.cols() != pool.pooled.cols()) {
    Mismatch("dynamic_max_pool_backward: shape mismatch");
  }
  Matrix g = Matrix::Zero(upstream.rows(), num_nodes);
  for (Eigen::Index t = 0; t < upstream.cols(); ++t) {
    for (Eigen::Index c = 0; c < upstream.rows(); ++c) {
      g(c, pool.argmax(c, t)) += upstream(c, t);
    }
  }
  return g;
}

Matrix LinearForward(const LinearLayer& layer, const Matrix& x) {
  if (x.rows() != layer.in_dim()) {
    Mismatch("linear_forward: input dim " + std::to_string(x.rows()) +
             " != layer input dim " + std::to_string(layer.in_dim()));
  }
  Matrix out = layer.weight * x;
  out.colwise() += layer.bias;
  return out;
}

LinearGrads LinearBackward(const LinearLayer& layer, const Matrix& x,
                           const Matrix& upstream) {
  if (x.rows() != layer.in_dim() || upstream.rows() != layer.out_dim() ||
      upstream.cols() != x.cols()) {
    Mismatch("linear_backward: gradient shape does not match the layer");
  }
  LinearGrads g;
  g.weight.noalias() = upstream * x.transpose();
  g.bias = upstream.rowwise().sum();
  g.input.noalias() = layer.weight.transpose() * upstream;
  return g;
}

void AdamStep(std::span<double> params, std::span<const double> grads,
              AdamState* state, double learning_rate) {
  if (params.size() != grads.size()) {
    throw Error(ErrorCode::kShapeMismatch,
                "adam_step: " + std::to_string(params.size()) + " parameters but " +
                    std::to_string(grads.size()) + " gradients");
  }
  if (state->m.empty() && state->step == 0) {
    state->m.assign(params.size(), 0.0);
    state->v.assign(params.size(), 0.0);
  }
  if (state->m.size() != params.size() || state->v.size() != params.size()) {
    throw Error(ErrorCode::kShapeMismatch, "adam_step: state size differs from parameters");
  }
  for (std::size_t i = 0; i < grads.size(); ++i) {
    if (!std::isfinite(grads[i])) {
      throw Error(ErrorCode::kNonFiniteGradient,
                  "adam_step: gradient " + std::to_string(i) + " is not finite");
    }
  }
  ++state->step;
  const double t = static_cast<double>(state->step);
  const double c1 = 1.0 - std::pow(state->beta1, t);
  const double c2 = 1.0 - std::pow(state->beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    state->m[i] = state->beta1 * state->m[i] + (1.0 - state->beta1) * g;
    state->v[i] = state->beta2 * state->v[i] + (1.0 - state->beta2) * g * g;
    const double m_hat = state->m[i] / c1;
    const double v_hat = state->v[i] / c2;
    params[i] -= learning_rate * m_hat / (std::sqrt(v_hat) + state->epsilon);
  }
}

double FiniteDiffCheck(const LossWithGradient& loss, std::span<const double> params,
                       double step, double floor) {
  std::vector<double> analytic;
  loss(params, &analytic);
  if (analytic.size() != params.size()) {
    throw Error(ErrorCode::kShapeMismatch, "finite_diff_check: gradient size mismatch");
  }
  std::vector<double> probe(params.begin(), params.end());
  double worst = 0.0;
  for (std::size_t i = 0; i < probe.size(); ++i) {
    const double saved = probe[i];
    probe[i] = saved + step;
    const double plus = loss(probe, nullptr);
    probe[i] = saved - step;
    const double minus = loss(probe, nullptr);
    probe[i] = saved;
    const double numeric = (plus - minus) / (2.0 * step);
    const double denom =
        std::max(floor, std::abs(analytic[i]) + std::abs(numeric));
    worst = std::max(worst, std::abs(analytic[i] - numeric) / denom);
  }
  return worst;
}

}  // namespace hintrank::nn
