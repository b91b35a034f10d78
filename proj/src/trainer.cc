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

#include "hintrank/trainer.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <unordered_map>

#include "hintrank/digest.h"
#include "hintrank/io.h"
#include "hintrank/status.h"
#include "json.hpp"

namespace hintrank {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// Independent streams derived from the user seed.
constexpr std::uint64_t kSplitStream = 0x5eed0001;
constexpr std::uint64_t kShuffleStream = 0x5eed0002;

[[noreturn]] void BadConfig(const std::string& what) {
  throw Error(ErrorCode::kInvalidConfig, "train config: " + what);
}

std::vector<int> ValidationQueries(int num_queries, double fraction, std::uint64_t seed) {
  if (num_queries < 2) return {};
  const int count = std::clamp(static_cast<int>(std::floor(fraction * num_queries)), 1,
                               num_queries - 1);
  std::vector<int> ids(num_queries);
  std::iota(ids.begin(), ids.end(), 0);
  SeededRng rng(seed ^ kSplitStream);
  rng.Shuffle(ids.begin(), ids.end());
  ids.resize(count);
  std::sort(ids.begin(), ids.end());
  return ids;
}

// Encoded candidates for a set of queries with the per-query offsets.
struct EncodedSet {
  std::vector<EncodedTree> trees;
  std::vector<int> offsets;
};

EncodedSet EncodeAll(std::span<const QueryEntry> entries, const FeatureScaler& scaler) {
  EncodedSet out;
  out.offsets = PlanOffsets(entries);
  out.trees.reserve(out.offsets.back());
  for (const QueryEntry& e : entries) {
    for (const CandidatePlan& c : e.candidates) {
      out.trees.push_back(Encode(Binarize(c.plan), scaler));
    }
  }
  return out;
}

double SelectedLatencySum(const ScorerParams& params, std::span<const QueryEntry> entries,
                          const EncodedSet& encoded) {
  if (entries.empty()) return 0.0;
  std::vector<const EncodedTree*> trees;
  trees.reserve(encoded.trees.size());
  for (const EncodedTree& t : encoded.trees) trees.push_back(&t);
  const std::vector<double> scores = ScoreBatch(params, trees);
  double total = 0.0;
  for (std::size_t q = 0; q < entries.size(); ++q) {
    const QueryEntry& e = entries[q];
    std::vector<int> ids;
    for (const CandidatePlan& c : e.candidates) {
      if (!(c.latency_ms > 0.0)) {
        throw Error(ErrorCode::kMissingLatency,
                    "query " + e.query_id + " has a candidate without a latency");
      }
      ids.push_back(c.hint_set_ids.front());
    }
    const auto first = scores.begin() + encoded.offsets[q];
    const int pick = ArgmaxWithTieBreak(
        std::span<const double>(first, first + e.candidates.size()), ids);
    total += e.candidates[pick].latency_ms;
  }
  return total;
}

// Pulls the plans a mini-batch touches into a dense local index.
struct LocalPlans {
  std::vector<const EncodedTree*> trees;
  std::unordered_map<int, int> local;

  int Add(int global, const std::vector<EncodedTree>& all) {
    auto [it, inserted] = local.try_emplace(global, static_cast<int>(trees.size()));
    if (inserted) trees.push_back(&all[global]);
    return it->second;
  }
};

}  // namespace

void TrainConfig::Validate() const {
  if (!(learning_rate > 0.0)) BadConfig("learning_rate must be > 0");
  if (max_epochs < 1) BadConfig("max_epochs must be >= 1");
  if (early_stop_patience < 1) BadConfig("early_stop_patience must be >= 1");
  if (batch_size < 0) BadConfig("batch_size must be >= 0");
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
    BadConfig("validation_fraction must lie in (0, 1)");
  }
  shape.Validate();
}

int TrainConfig::EffectiveBatchSize() const {
  if (batch_size > 0) return batch_size;
  return mode == TrainMode::kListwise ? 16 : 256;
}

std::string TrainConfig::ToJson() const {
  ordered_json j;
  j["mode"] = TrainModeName(mode);
  j["learning_rate"] = learning_rate;
  j["max_epochs"] = max_epochs;
  j["early_stop_patience"] = early_stop_patience;
  j["batch_size"] = EffectiveBatchSize();
  j["validation_fraction"] = validation_fraction;
  j["seed"] = seed;
  j["shuffle"] = shuffle;
  j["conv_channels"] = shape.conv_channels;
  j["mlp_hidden"] = shape.mlp_hidden;
  return j.dump(2);
}

TrainConfig TrainConfig::FromJson(std::string_view json_text) {
  const json j = json::parse(json_text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) BadConfig("expected a JSON object");
  TrainConfig c;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "mode") {
        c.mode = ParseTrainMode(value.get<std::string>());
      } else if (key == "learning_rate") {
        c.learning_rate = value.get<double>();
      } else if (key == "max_epochs") {
        c.max_epochs = value.get<int>();
      } else if (key == "early_stop_patience") {
        c.early_stop_patience = value.get<int>();
      } else if (key == "batch_size") {
        c.batch_size = value.get<int>();
      } else if (key == "validation_fraction") {
        c.validation_fraction = value.get<double>();
      } else if (key == "seed") {
        c.seed = value.get<std::uint64_t>();
      } else if (key == "shuffle") {
        c.shuffle = value.get<bool>();
      } else if (key == "conv_channels") {
        c.shape.conv_channels = value.get<std::vector<int>>();
      } else if (key == "mlp_hidden") {
        c.shape.mlp_hidden = value.get<std::vector<int>>();
      } else {
        BadConfig("unknown key \"" + key + "\"");
      }
    }
  } catch (const json::exception& e) {
    BadConfig(e.what());
  }
  c.Validate();
  return c;
}

std::string TrainConfig::Digest() const { return Sha256Hex(ToJson()); }

std::vector<int> PlanOffsets(std::span<const QueryEntry> entries) {
  std::vector<int> offsets{0};
  for (const QueryEntry& e : entries) {
    offsets.push_back(offsets.back() + static_cast<int>(e.candidates.size()));
  }
  return offsets;
}

TrainingSamples BuildSamples(std::span<const QueryEntry> entries, TrainMode mode) {
  if (entries.empty()) throw Error(ErrorCode::kEmptyDataset, "no training queries");
  TrainingSamples s;
  s.mode = mode;
  const std::vector<int> offsets = PlanOffsets(entries);
  for (std::size_t q = 0; q < entries.size(); ++q) {
    const QueryEntry& e = entries[q];
    std::vector<double> latencies;
    std::vector<int> ids;
    for (const CandidatePlan& c : e.candidates) {
      latencies.push_back(c.latency_ms);
      ids.push_back(c.hint_set_ids.front());
    }
    switch (mode) {
      case TrainMode::kPairwise: {
        auto pairs = ltr::FullBreaking(
            ltr::MakeRankedList(e.query_id, latencies, ids, offsets[q]));
        s.pairs.insert(s.pairs.end(), pairs.begin(), pairs.end());
        break;
      }
      case TrainMode::kListwise:
        s.lists.push_back(ltr::MakeRankedList(e.query_id, latencies, ids, offsets[q]));
        break;
      case TrainMode::kRegression:
        for (std::size_t i = 0; i < latencies.size(); ++i) {
          s.plans.push_back(offsets[q] + static_cast<int>(i));
          s.latencies.push_back(latencies[i]);
        }
        break;
    }
  }
  return s;
}

bool EarlyStopping::Update(double epoch_loss) {
  if (!has_best_ || epoch_loss < best_) {
    has_best_ = true;
    best_ = epoch_loss;
    stale_ = 0;
    return false;
  }
  return ++stale_ >= patience_;
}

std::string TrainReport::ToJson(bool include_timing) const {
  ordered_json j;
  j["epochs_run"] = epochs_run;
  j["best_epoch"] = best_epoch;
  j["early_stopped"] = early_stopped;
  j["num_queries"] = num_queries;
  j["num_train_queries"] = num_train_queries;
  j["num_validation_queries"] = num_validation_queries;
  j["num_unique_plans"] = num_unique_plans;
  j["num_samples"] = num_samples;
  j["train_loss"] = train_loss;
  j["validation_metric"] = validation_metric;
  if (include_timing) j["wall_seconds"] = wall_seconds;
  return j.dump(2) + "\n";
}

double ValidationMetric(const ScorerParams& params, std::span<const QueryEntry> entries) {
  return SelectedLatencySum(params, entries, EncodeAll(entries, params.scaler));
}

TrainResult Train(std::span<const QueryEntry> entries, const std::string& catalog_hash,
                  const TrainConfig& config) {
  config.Validate();
  if (entries.empty()) throw Error(ErrorCode::kEmptyDataset, "no training queries");
  const auto started = std::chrono::steady_clock::now();

  const std::vector<int> val_ids =
      ValidationQueries(static_cast<int>(entries.size()), config.validation_fraction,
                        config.seed);
  std::vector<QueryEntry> train_set;
  std::vector<QueryEntry> val_set;
  for (int q = 0, v = 0; q < static_cast<int>(entries.size()); ++q) {
    if (v < static_cast<int>(val_ids.size()) && val_ids[v] == q) {
      val_set.push_back(entries[q]);
      ++v;
    } else {
      train_set.push_back(entries[q]);
    }
  }

  std::vector<const PlanTree*> corpus;
  for (const QueryEntry& e : train_set) {
    for (const CandidatePlan& c : e.candidates) corpus.push_back(&c.plan);
  }

  ScorerParams params = InitParams(config.seed, config.shape);
  params.scaler = FitScaler(std::span<const PlanTree* const>(corpus));
  params.catalog_hash = catalog_hash;

  const EncodedSet train_enc = EncodeAll(train_set, params.scaler);
  const EncodedSet val_enc = EncodeAll(val_set, params.scaler);
  const TrainingSamples samples = BuildSamples(train_set, config.mode);

  std::vector<double> regression_targets;
  if (config.mode == TrainMode::kRegression) {
    const auto norm = ltr::RegressionTargets::Fit(samples.latencies);
    // Faster plans get larger targets so that argmax selection applies to
    // every mode.
    for (double l : samples.latencies) regression_targets.push_back(1.0 - norm.Normalize(l));
  }

  std::size_t num_samples = 0;
  switch (config.mode) {
    case TrainMode::kPairwise: num_samples = samples.pairs.size(); break;
    case TrainMode::kListwise: num_samples = samples.lists.size(); break;
    case TrainMode::kRegression: num_samples = samples.plans.size(); break;
  }

  TrainReport report;
  report.num_queries = static_cast<int>(entries.size());
  report.num_train_queries = static_cast<int>(train_set.size());
  report.num_validation_queries = static_cast<int>(val_set.size());
  report.num_unique_plans = train_enc.offsets.back() + val_enc.offsets.back();
  report.num_samples = static_cast<std::int64_t>(num_samples);

  std::vector<double> flat = params.Flatten();
  nn::AdamState adam;
  EarlyStopping stopper(config.early_stop_patience);
  SeededRng shuffle_rng(config.seed ^ kShuffleStream);
  std::vector<std::size_t> order(num_samples);
  std::iota(order.begin(), order.end(), 0);
  const std::size_t batch_size = static_cast<std::size_t>(config.EffectiveBatchSize());

  double best_metric = std::numeric_limits<double>::infinity();
  std::vector<double> best_flat = flat;
  int best_epoch = 0;

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    if (config.shuffle) shuffle_rng.Shuffle(order.begin(), order.end());
    double epoch_loss = 0.0;
    for (std::size_t begin = 0; begin < num_samples; begin += batch_size) {
      const std::size_t end = std::min(num_samples, begin + batch_size);
      const double scale = 1.0 / static_cast<double>(end - begin);
      LocalPlans local;
      double batch_loss = 0.0;
      std::vector<double> dscores;
      ForwardCache cache;

      if (config.mode == TrainMode::kPairwise) {
        std::vector<ltr::PairSample> pairs;
        for (std::size_t i = begin; i < end; ++i) {
          const ltr::PairSample& p = samples.pairs[order[i]];
          pairs.push_back(ltr::PairSample{p.query_id, local.Add(p.winner, train_enc.trees),
                                          local.Add(p.loser, train_enc.trees)});
        }
        cache = ForwardBatch(params, local.trees);
        ltr::LossAndGrad lg = ltr::PairwiseLossAndGrad(pairs, cache.scores);
        batch_loss = lg.loss;
        dscores = std::move(lg.grad);
      } else if (config.mode == TrainMode::kListwise) {
        std::vector<ltr::RankedList> lists;
        for (std::size_t i = begin; i < end; ++i) {
          ltr::RankedList list = samples.lists[order[i]];
          for (ltr::RankedItem& item : list.items) {
            item.plan = local.Add(item.plan, train_enc.trees);
          }
          lists.push_back(std::move(list));
        }
        cache = ForwardBatch(params, local.trees);
        dscores.assign(cache.scores.size(), 0.0);
        for (const ltr::RankedList& list : lists) {
          ltr::LossAndGrad lg = ltr::ListwiseLossAndGrad(list, cache.scores);
          batch_loss += lg.loss;
          for (std::size_t k = 0; k < dscores.size(); ++k) dscores[k] += lg.grad[k];
        }
      } else {
        std::vector<double> targets;
        for (std::size_t i = begin; i < end; ++i) {
          local.Add(samples.plans[order[i]], train_enc.trees);
          targets.push_back(regression_targets[order[i]]);
        }
        cache = ForwardBatch(params, local.trees);
        ltr::LossAndGrad lg = ltr::RegressionLossAndGrad(targets, cache.scores);
        // The regression loss is already a batch mean; convert to a sum so
        // the common scaling below applies.
        batch_loss = lg.loss * static_cast<double>(end - begin);
        dscores = std::move(lg.grad);
        for (double& g : dscores) g *= static_cast<double>(end - begin);
      }

      if (!std::isfinite(batch_loss)) {
        throw Error(ErrorCode::kNonFiniteLoss,
                    "epoch " + std::to_string(epoch) + ", batch starting at sample " +
                        std::to_string(begin) + ": loss is not finite");
      }
      epoch_loss += batch_loss;
      for (double& g : dscores) g *= scale;
      const std::vector<double> grads = BackwardBatch(params, cache, dscores);
      nn::AdamStep(flat, grads, &adam, config.learning_rate);
      params.Unflatten(flat);
    }
    epoch_loss /= std::max<std::size_t>(1, num_samples);
    report.train_loss.push_back(epoch_loss);

    // Without a validation split the latest epoch is kept.
    const double metric = val_set.empty()
                              ? -static_cast<double>(epoch)
                              : SelectedLatencySum(params, val_set, val_enc);
    report.validation_metric.push_back(val_set.empty() ? 0.0 : metric);
    if (metric < best_metric) {
      best_metric = metric;
      best_flat = flat;
      best_epoch = epoch;
    }
    report.epochs_run = epoch;
    if (stopper.Update(epoch_loss)) {
      report.early_stopped = epoch < config.max_epochs;
      break;
    }
  }

  params.Unflatten(best_flat);
  report.best_epoch = best_epoch;
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  TrainResult result;
  result.checkpoint.params = std::move(params);
  result.checkpoint.mode = config.mode;
  result.checkpoint.config_digest = config.Digest();
  result.checkpoint.best_validation = val_set.empty() ? 0.0 : best_metric;
  result.checkpoint.best_epoch = best_epoch;
  result.report = std::move(report);
  return result;
}

}  // namespace hintrank
