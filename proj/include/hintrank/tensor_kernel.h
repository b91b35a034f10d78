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

// The handful of differentiable layers the plan scorer needs: tree
// convolution, leaky ReLU, per-tree max pooling and dense layers, each with a
// hand-written backward pass, plus Adam and a central-difference checker.
//
// Feature tensors are column-major Eigen matrices with one column per tree
// node (or per sample for dense layers). A batch of trees is a Forest: the
// non-null nodes of every tree laid out contiguously in preorder, with child
// links as column indices. A link of -1 is a Null or absent child and
// contributes a zero vector.

#ifndef HINTRANK_TENSOR_KERNEL_H_
#define HINTRANK_TENSOR_KERNEL_H_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "hintrank/plan_ir.h"

namespace hintrank::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IndexMatrix = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;

inline constexpr double kDefaultLeakySlope = 0.01;

struct TreeConvLayer {
  Matrix self;   // d_out x d_in, applied to the node itself
  Matrix left;   // d_out x d_in, applied to the left child
  Matrix right;  // d_out x d_in, applied to the right child
  Vector bias;   // d_out

  TreeConvLayer() = default;
  TreeConvLayer(int in_dim, int out_dim);

  int in_dim() const { return static_cast<int>(self.cols()); }
  int out_dim() const { return static_cast<int>(self.rows()); }
  std::int64_t ParamCount() const;
};

struct LinearLayer {
  Matrix weight;  // d_out x d_in
  Vector bias;    // d_out

  LinearLayer() = default;
  LinearLayer(int in_dim, int out_dim);

  int in_dim() const { return static_cast<int>(weight.cols()); }
  int out_dim() const { return static_cast<int>(weight.rows()); }
  std::int64_t ParamCount() const;
};

struct Forest {
  std::vector<int> left;
  std::vector<int> right;
  std::vector<int> tree_begin;  // num_trees + 1 offsets into the columns

  int num_nodes() const { return static_cast<int>(left.size()); }
  int num_trees() const { return static_cast<int>(tree_begin.size()) - 1; }
};

struct ForestBatch {
  Forest forest;
  Matrix features;  // kNodeFeatureDim x num_nodes
};

// Packs the non-null nodes of each tree. Throws EmptyTree when a tree has no
// non-null node.
ForestBatch PackForest(std::span<const EncodedTree* const> trees);

// Columns of x selected by index; -1 yields a zero column.
Matrix Gather(const Matrix& x, std::span<const int> index);

Matrix TreeConvForward(const TreeConvLayer& layer, const Forest& forest,
                       const Matrix& x);

struct TreeConvGrads {
  Matrix self;
  Matrix left;
  Matrix right;
  Vector bias;
  Matrix input;
};

// Exact gradients of TreeConvForward given dL/d(out). A node's input
// gradient collects what it receives as itself and as a left or right child.
TreeConvGrads TreeConvBackward(const TreeConvLayer& layer, const Forest& forest,
                               const Matrix& x, const Matrix& upstream);

Matrix LeakyRelu(const Matrix& x, double slope = kDefaultLeakySlope);
// The derivative at exactly zero is taken as `slope`.
Matrix LeakyReluBackward(const Matrix& pre_activation, const Matrix& upstream,
                         double slope = kDefaultLeakySlope);

struct PoolResult {
  Matrix pooled;       // channels x num_trees
  IndexMatrix argmax;  // channels x num_trees, column index of the winner
};

// Per-channel max over each tree's nodes. Ties go to the earliest node in
// preorder.
PoolResult DynamicMaxPool(const Forest& forest, const Matrix& x);
Matrix DynamicMaxPoolBackward(const PoolResult& pool, const Matrix& upstream,
                              int num_nodes);

Matrix LinearForward(const LinearLayer& layer, const Matrix& x);

struct LinearGrads {
  Matrix weight;
  Vector bias;
  Matrix input;
};

LinearGrads LinearBackward(const LinearLayer& layer, const Matrix& x,
                           const Matrix& upstream);

struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::vector<double> m;
  std::vector<double> v;
  std::int64_t step = 0;
};

// Bias-corrected Adam. Sizes the moments on first use; afterwards a size
// change is a ShapeMismatch. A non-finite gradient throws before anything is
// modified.
void AdamStep(std::span<double> params, std::span<const double> grads,
              AdamState* state, double learning_rate);

// Returns the loss at `params`; fills `grad` with the analytic gradient when
// it is non-null.
using LossWithGradient =
    std::function<double(std::span<const double> params, std::vector<double>* grad)>;

// Max over coordinates of |analytic - numeric| / max(floor, |analytic| + |numeric|)
// with central differences of half-width `step`. The floor keeps round-off in
// near-zero gradients from dominating.
double FiniteDiffCheck(const LossWithGradient& loss, std::span<const double> params,
                       double step, double floor = 1e-8);

}  // namespace hintrank::nn

#endif  // HINTRANK_TENSOR_KERNEL_H_
