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

#include "hintrank/scorer.h"

#include <cmath>
#include <string>

#include "hintrank/io.h"
#include "hintrank/status.h"

namespace hintrank {
namespace {

using nn::Matrix;

void AppendRowMajor(const Matrix& m, std::vector<double>* out) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out->push_back(m(r, c));
  }
}

void AppendVector(const nn::Vector& v, std::vector<double>* out) {
  out->insert(out->end(), v.data(), v.data() + v.size());
}

void ReadRowMajor(std::span<const double> values, std::size_t* pos, Matrix* m) {
  for (Eigen::Index r = 0; r < m->rows(); ++r) {
    for (Eigen::Index c = 0; c < m->cols(); ++c) (*m)(r, c) = values[(*pos)++];
  }
}

void ReadVector(std::span<const double> values, std::size_t* pos, nn::Vector* v) {
  for (Eigen::Index i = 0; i < v->size(); ++i) (*v)(i) = values[(*pos)++];
}

void FillUniform(SeededRng* rng, double bound, Matrix* m) {
  for (Eigen::Index r = 0; r < m->rows(); ++r) {
    for (Eigen::Index c = 0; c < m->cols(); ++c) {
      (*m)(r, c) = (2.0 * rng->Uniform() - 1.0) * bound;
    }
  }
}

}  // namespace

void ScorerShape::Validate() const {
  if (conv_channels.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "scorer needs at least one conv layer");
  }
  if (input_dim <= 0) throw Error(ErrorCode::kInvalidConfig, "input_dim must be > 0");
  for (int c : conv_channels) {
    if (c <= 0) throw Error(ErrorCode::kInvalidConfig, "conv widths must be > 0");
  }
  for (int h : mlp_hidden) {
    if (h <= 0) throw Error(ErrorCode::kInvalidConfig, "mlp widths must be > 0");
  }
}

std::int64_t ParamCount(const ScorerShape& shape) {
  shape.Validate();
  std::int64_t total = 0;
  std::int64_t in = shape.input_dim;
  for (int out : shape.conv_channels) {
    total += 3 * in * out + out;
    in = out;
  }
  for (int out : shape.mlp_hidden) {
    total += in * out + out;
    in = out;
  }
  return total + in + 1;
}

std::int64_t ParamCount(const ScorerParams& params) {
  std::int64_t total = 0;
  for (const auto& l : params.conv) total += l.ParamCount();
  for (const auto& l : params.mlp) total += l.ParamCount();
  return total;
}

std::vector<double> ScorerParams::Flatten() const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(ParamCount(*this)));
  for (const auto& l : conv) {
    AppendRowMajor(l.self, &out);
    AppendRowMajor(l.left, &out);
    AppendRowMajor(l.right, &out);
    AppendVector(l.bias, &out);
  }
  for (const auto& l : mlp) {
    AppendRowMajor(l.weight, &out);
    AppendVector(l.bias, &out);
  }
  return out;
}

void ScorerParams::Unflatten(std::span<const double> values) {
  if (static_cast<std::int64_t>(values.size()) != ParamCount(*this)) {
    throw Error(ErrorCode::kShapeMismatch,
                "unflatten: expected " + std::to_string(ParamCount(*this)) +
                    " values, got " + std::to_string(values.size()));
  }
  std::size_t pos = 0;
  for (auto& l : conv) {
    ReadRowMajor(values, &pos, &l.self);
    ReadRowMajor(values, &pos, &l.left);
    ReadRowMajor(values, &pos, &l.right);
    ReadVector(values, &pos, &l.bias);
  }
  for (auto& l : mlp) {
    ReadRowMajor(values, &pos, &l.weight);
    ReadVector(values, &pos, &l.bias);
  }
}

ScorerParams InitParams(std::uint64_t seed, const ScorerShape& shape) {
  shape.Validate();
  ScorerParams p;
  p.shape = shape;
  p.seed = seed;
  SeededRng rng(seed);
  int in = shape.input_dim;
  for (int out : shape.conv_channels) {
    nn::TreeConvLayer layer(in, out);
    const double bound = std::sqrt(6.0 / (3.0 * in + out));
    FillUniform(&rng, bound, &layer.self);
    FillUniform(&rng, bound, &layer.left);
    FillUniform(&rng, bound, &layer.right);
    p.conv.push_back(std::move(layer));
    in = out;
  }
  std::vector<int> dense = shape.mlp_hidden;
  dense.push_back(1);
  for (int out : dense) {
    nn::LinearLayer layer(in, out);
    FillUniform(&rng, std::sqrt(6.0 / (in + out)), &layer.weight);
    p.mlp.push_back(std::move(layer));
    in = out;
  }
  return p;
}

ForwardCache ForwardBatch(const ScorerParams& params,
                          std::span<const EncodedTree* const> trees) {
  ForwardCache cache;
  cache.batch = nn::PackForest(trees);
  const nn::Forest& forest = cache.batch.forest;
  Matrix x = cache.batch.features;
  for (const auto& layer : params.conv) {
    Matrix pre = nn::TreeConvForward(layer, forest, x);
    cache.conv_in.push_back(std::move(x));
    x = nn::LeakyRelu(pre);
    cache.conv_pre.push_back(std::move(pre));
  }
  cache.pool = nn::DynamicMaxPool(forest, x);
  Matrix h = cache.pool.pooled;
  for (std::size_t i = 0; i < params.mlp.size(); ++i) {
    Matrix pre = nn::LinearForward(params.mlp[i], h);
    cache.mlp_in.push_back(std::move(h));
    const bool last = i + 1 == params.mlp.size();
    h = last ? pre : nn::LeakyRelu(pre);
    cache.mlp_pre.push_back(std::move(pre));
  }
  cache.scores.assign(h.data(), h.data() + h.size());
  return cache;
}

std::vector<double> BackwardBatch(const ScorerParams& params,
                                  const ForwardCache& cache,
                                  std::span<const double> dscores) {
  if (dscores.size() != cache.scores.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "backward: one score gradient per tree is required");
  }
  Matrix g = Eigen::Map<const Matrix>(dscores.data(), 1,
                                      static_cast<Eigen::Index>(dscores.size()));
  std::vector<nn::LinearGrads> mlp_grads(params.mlp.size());
  for (std::size_t i = params.mlp.size(); i-- > 0;) {
    if (i + 1 != params.mlp.size()) g = nn::LeakyReluBackward(cache.mlp_pre[i], g);
    mlp_grads[i] = nn::LinearBackward(params.mlp[i], cache.mlp_in[i], g);
    g = std::move(mlp_grads[i].input);
  }
  const nn::Forest& forest = cache.batch.forest;
  g = nn::DynamicMaxPoolBackward(cache.pool, g, forest.num_nodes());
  std::vector<nn::TreeConvGrads> conv_grads(params.conv.size());
  for (std::size_t i = params.conv.size(); i-- > 0;) {
    g = nn::LeakyReluBackward(cache.conv_pre[i], g);
    conv_grads[i] = nn::TreeConvBackward(params.conv[i], forest, cache.conv_in[i], g);
    g = std::move(conv_grads[i].input);
  }

  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(ParamCount(params)));
  for (const auto& cg : conv_grads) {
    AppendRowMajor(cg.self, &out);
    AppendRowMajor(cg.left, &out);
    AppendRowMajor(cg.right, &out);
    AppendVector(cg.bias, &out);
  }
  for (const auto& lg : mlp_grads) {
    AppendRowMajor(lg.weight, &out);
    AppendVector(lg.bias, &out);
  }
  return out;
}

nn::Matrix EmbedBatch(const ScorerParams& params,
                      std::span<const EncodedTree* const> trees) {
  nn::ForestBatch batch = nn::PackForest(trees);
  Matrix x = std::move(batch.features);
  for (const auto& layer : params.conv) {
    x = nn::LeakyRelu(nn::TreeConvForward(layer, batch.forest, x));
  }
  return nn::DynamicMaxPool(batch.forest, x).pooled;
}

nn::Vector Embed(const ScorerParams& params, const EncodedTree& tree) {
  const EncodedTree* one[] = {&tree};
  return EmbedBatch(params, one).col(0);
}

std::vector<double> ScoreBatch(const ScorerParams& params,
                               std::span<const EncodedTree* const> trees) {
  if (trees.empty()) return {};
  Matrix h = EmbedBatch(params, trees);
  for (std::size_t i = 0; i < params.mlp.size(); ++i) {
    h = nn::LinearForward(params.mlp[i], h);
    if (i + 1 != params.mlp.size()) h = nn::LeakyRelu(h);
  }
  return std::vector<double>(h.data(), h.data() + h.size());
}

double Score(const ScorerParams& params, const EncodedTree& tree) {
  const EncodedTree* one[] = {&tree};
  return ScoreBatch(params, one)[0];
}

int ArgmaxWithTieBreak(std::span<const double> scores, std::span<const int> ids) {
  if (scores.empty()) throw Error(ErrorCode::kEmptyCandidates, "no candidates to rank");
  int best = 0;
  for (int i = 1; i < static_cast<int>(scores.size()); ++i) {
    if (scores[i] > scores[best] || (scores[i] == scores[best] && ids[i] < ids[best])) {
      best = i;
    }
  }
  return best;
}

HintSet SelectHint(const ScorerParams& params, std::span<const Candidate> candidates) {
  if (candidates.empty()) throw Error(ErrorCode::kEmptyCandidates, "no candidates to rank");
  std::vector<const EncodedTree*> trees;
  std::vector<int> ids;
  for (const Candidate& c : candidates) {
    trees.push_back(&c.tree);
    ids.push_back(c.hint_set.id);
  }
  const std::vector<double> scores = ScoreBatch(params, trees);
  return candidates[ArgmaxWithTieBreak(scores, ids)].hint_set;
}

std::string_view TrainModeName(TrainMode mode) {
  switch (mode) {
    case TrainMode::kPairwise: return "pairwise";
    case TrainMode::kListwise: return "listwise";
    case TrainMode::kRegression: return "regression";
  }
  return "pairwise";
}

TrainMode ParseTrainMode(std::string_view name) {
  if (name == "pairwise") return TrainMode::kPairwise;
  if (name == "listwise") return TrainMode::kListwise;
  if (name == "regression") return TrainMode::kRegression;
  throw Error(ErrorCode::kInvalidConfig,
              "unknown mode \"" + std::string(name) +
                  "\"; expected pairwise, listwise or regression");
}

}  // namespace hintrank
