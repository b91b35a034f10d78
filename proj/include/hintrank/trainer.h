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

#ifndef HINTRANK_TRAINER_H_
#define HINTRANK_TRAINER_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hintrank/datastore.h"
#include "hintrank/ltr.h"
#include "hintrank/scorer.h"

namespace hintrank {

struct TrainConfig {
  TrainMode mode = TrainMode::kPairwise;
  double learning_rate = 0.001;
  int max_epochs = 100;
  int early_stop_patience = 10;
  // 0 selects the per-mode default: 256 pairs, 16 lists or 256 plans.
  int batch_size = 0;
  double validation_fraction = 0.10;
  std::uint64_t seed = 0;
  bool shuffle = true;
  ScorerShape shape;

  // Throws InvalidConfig.
  void Validate() const;
  int EffectiveBatchSize() const;

  std::string ToJson() const;
  // Keys mirror the field names; missing keys keep their defaults, unknown
  // keys are rejected.
  static TrainConfig FromJson(std::string_view json_text);
  std::string Digest() const;
};

// Training samples. Plan indices address the concatenation of every query's
// candidates in entry order (see PlanOffsets).
struct TrainingSamples {
  TrainMode mode = TrainMode::kPairwise;
  std::vector<ltr::PairSample> pairs;
  std::vector<ltr::RankedList> lists;
  std::vector<int> plans;        // regression: one sample per unique plan
  std::vector<double> latencies;  // regression: latency of plans[i]
};

// offsets[q] is the index of query q's first candidate; offsets.back() is the
// total number of candidates.
std::vector<int> PlanOffsets(std::span<const QueryEntry> entries);

// Throws EmptyDataset.
TrainingSamples BuildSamples(std::span<const QueryEntry> entries, TrainMode mode);

// Stops once the training loss has gone `patience` epochs without beating its
// best value.
class EarlyStopping {
 public:
  explicit EarlyStopping(int patience) : patience_(patience) {}
  // Returns true when training should stop after this epoch.
  bool Update(double epoch_loss);

 private:
  int patience_;
  int stale_ = 0;
  bool has_best_ = false;
  double best_ = 0.0;
};

struct TrainReport {
  std::vector<double> train_loss;         // mean per sample, one per epoch
  std::vector<double> validation_metric;  // one per epoch
  int best_epoch = 0;                     // 1-based
  int epochs_run = 0;
  bool early_stopped = false;
  double wall_seconds = 0.0;
  int num_queries = 0;
  int num_train_queries = 0;
  int num_validation_queries = 0;
  int num_unique_plans = 0;
  std::int64_t num_samples = 0;  // pairs, lists or plans depending on mode

  // Wall-clock time is left out unless requested so that identical runs
  // produce identical files.
  std::string ToJson(bool include_timing = false) const;
};

struct TrainResult {
  Checkpoint checkpoint;
  TrainReport report;
};

// Sum over queries of the recorded latency of the plan SelectHint picks.
// Throws MissingLatency when a candidate has no positive latency.
double ValidationMetric(const ScorerParams& params, std::span<const QueryEntry> entries);

// Throws EmptyDataset, InvalidConfig, NonFiniteLoss.
TrainResult Train(std::span<const QueryEntry> entries, const std::string& catalog_hash,
                  const TrainConfig& config);

}  // namespace hintrank

#endif  // HINTRANK_TRAINER_H_
