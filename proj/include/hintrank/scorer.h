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

// The plan ranking model: stacked tree convolutions with leaky ReLU, max
// pooling to a fixed-size plan embedding, then a small MLP that emits one
// score per plan. Higher scores mean faster predicted plans.

#ifndef HINTRANK_SCORER_H_
#define HINTRANK_SCORER_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hintrank/hint_catalog.h"
#include "hintrank/plan_ir.h"
#include "hintrank/tensor_kernel.h"

namespace hintrank {

struct ScorerShape {
  int input_dim = kNodeFeatureDim;
  std::vector<int> conv_channels = {256, 128, 64};
  std::vector<int> mlp_hidden = {32};

  // Throws InvalidConfig for zero conv layers or non-positive widths.
  void Validate() const;
  int embedding_dim() const { return conv_channels.back(); }

  friend bool operator==(const ScorerShape&, const ScorerShape&) = default;
};

std::int64_t ParamCount(const ScorerShape& shape);

struct ScorerParams {
  ScorerShape shape;
  std::vector<nn::TreeConvLayer> conv;
  // Hidden layers followed by the 1-output scoring layer.
  std::vector<nn::LinearLayer> mlp;
  FeatureScaler scaler;
  std::string catalog_hash;
  std::uint64_t seed = 0;

  // Trainable values in a fixed order: per conv layer self, left, right,
  // bias; per dense layer weight, bias. Matrices are row-major.
  std::vector<double> Flatten() const;
  void Unflatten(std::span<const double> values);
};

std::int64_t ParamCount(const ScorerParams& params);

// Uniform Glorot-style weights, zero biases. Deterministic in `seed`.
ScorerParams InitParams(std::uint64_t seed, const ScorerShape& shape = {});

// Activations kept from a batched forward pass for the backward pass.
struct ForwardCache {
  nn::ForestBatch batch;
  std::vector<nn::Matrix> conv_pre;  // pre-activation output of each conv
  std::vector<nn::Matrix> conv_in;   // input of each conv
  nn::PoolResult pool;
  std::vector<nn::Matrix> mlp_in;
  std::vector<nn::Matrix> mlp_pre;
  std::vector<double> scores;
};

ForwardCache ForwardBatch(const ScorerParams& params,
                          std::span<const EncodedTree* const> trees);

// Gradient of sum_i dscores[i] * score_i in Flatten() order.
std::vector<double> BackwardBatch(const ScorerParams& params,
                                  const ForwardCache& cache,
                                  std::span<const double> dscores);

nn::Vector Embed(const ScorerParams& params, const EncodedTree& tree);
// embedding_dim x trees
nn::Matrix EmbedBatch(const ScorerParams& params,
                      std::span<const EncodedTree* const> trees);
double Score(const ScorerParams& params, const EncodedTree& tree);
std::vector<double> ScoreBatch(const ScorerParams& params,
                               std::span<const EncodedTree* const> trees);

struct Candidate {
  HintSet hint_set;
  EncodedTree tree;
};

// Highest-scoring candidate; exact ties go to the lowest hint set id.
HintSet SelectHint(const ScorerParams& params, std::span<const Candidate> candidates);
// Index into `scores` of the winner under the same tie rule, given the ids.
int ArgmaxWithTieBreak(std::span<const double> scores, std::span<const int> ids);

enum class TrainMode { kPairwise, kListwise, kRegression };
std::string_view TrainModeName(TrainMode mode);
TrainMode ParseTrainMode(std::string_view name);

struct Checkpoint {
  ScorerParams params;
  TrainMode mode = TrainMode::kPairwise;
  std::string config_digest;
  double best_validation = 0.0;
  int best_epoch = 0;
};

inline constexpr std::uint32_t kCheckpointFormatVersion = 1;

std::string SerializeCheckpoint(const Checkpoint& checkpoint);
Checkpoint DeserializeCheckpoint(std::string_view bytes);
void SaveCheckpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint LoadCheckpoint(const std::filesystem::path& path);

}  // namespace hintrank

#endif  // HINTRANK_SCORER_H_
