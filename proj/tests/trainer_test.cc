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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "hintrank/status.h"
#include "test_util.h"

namespace hintrank {
namespace {

using testing::ExplainJson;
using testing::Join;
using testing::Leaf;

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kUsage;
}

PlanTree Variant(int v) {
  static const char* joins[] = {"Hash Join", "Merge Join", "Nested Loop"};
  static const char* scans[] = {"Seq Scan", "Index Scan", "Index Only Scan"};
  return ParseExplain(ExplainJson(Join(joins[v % 3], 100 + 7 * v, 10 + v,
                                       Leaf(scans[(v / 3) % 3], 10, 100, "a"),
                                       Leaf("Seq Scan", 20 + v, 30, "b"))));
}

// One candidate per latency; candidate i comes from hint set 2i.
QueryEntry Entry(const std::string& qid, const std::vector<double>& latencies) {
  QueryEntry e;
  e.query_id = qid;
  e.template_id = "t";
  for (std::size_t i = 0; i < latencies.size(); ++i) {
    CandidatePlan c;
    c.plan = Variant(static_cast<int>(i));
    c.fingerprint = Fingerprint(c.plan);
    c.latency_ms = latencies[i];
    c.hint_set_ids = {static_cast<int>(2 * i)};
    e.candidates.push_back(std::move(c));
  }
  e.default_latency = latencies.front();
  return e;
}

ScorerShape SmallShape() {
  ScorerShape s;
  s.conv_channels = {16, 8};
  s.mlp_hidden = {8};
  return s;
}

TEST(PlanOffsets, PrefixSums) {
  const std::vector<QueryEntry> es = {Entry("a", {1, 2, 3}), Entry("b", {1}),
                                      Entry("c", {4, 5})};
  EXPECT_EQ(PlanOffsets(es), (std::vector<int>{0, 3, 4, 6}));
}

TEST(BuildSamples, CountsPerMode) {
  const std::vector<QueryEntry> es = {Entry("a", {4, 1, 3, 2}), Entry("b", {7})};
  const TrainingSamples pw = BuildSamples(es, TrainMode::kPairwise);
  EXPECT_EQ(pw.pairs.size(), 6u);  // C(4,2) + 0
  for (const auto& p : pw.pairs) {
    EXPECT_EQ(p.query_id, "a");
    EXPECT_LT(es[0].candidates[p.winner].latency_ms, es[0].candidates[p.loser].latency_ms);
  }
  const TrainingSamples lw = BuildSamples(es, TrainMode::kListwise);
  ASSERT_EQ(lw.lists.size(), 2u);
  EXPECT_EQ(lw.lists[0].items.size(), 4u);
  EXPECT_EQ(lw.lists[0].items[0].plan, 1);  // fastest first
  EXPECT_EQ(lw.lists[1].items[0].plan, 4);  // offset by the first query
  const TrainingSamples rg = BuildSamples(es, TrainMode::kRegression);
  EXPECT_EQ(rg.plans, (std::vector<int>{0, 1, 2, 3, 4}));
  EXPECT_EQ(rg.latencies, (std::vector<double>{4, 1, 3, 2, 7}));
  EXPECT_EQ(CodeOf([] { BuildSamples({}, TrainMode::kPairwise); }), ErrorCode::kEmptyDataset);
}

TEST(BuildSamples, TiedLatenciesAreNotPaired) {
  const std::vector<QueryEntry> es = {Entry("a", {2, 2, 5})};
  EXPECT_EQ(BuildSamples(es, TrainMode::kPairwise).pairs.size(), 2u);
}

TEST(EarlyStopping, StrictImprovementNeverStops) {
  EarlyStopping s(10);
  for (int e = 0; e < 100; ++e) EXPECT_FALSE(s.Update(100.0 - e));
}

TEST(EarlyStopping, StopsAfterPatienceStaleEpochs) {
  EarlyStopping s(10);
  EXPECT_FALSE(s.Update(1.0));
  for (int e = 0; e < 9; ++e) EXPECT_FALSE(s.Update(1.0));
  EXPECT_TRUE(s.Update(1.5));
  EarlyStopping r(3);
  EXPECT_FALSE(r.Update(5));
  EXPECT_FALSE(r.Update(6));
  EXPECT_FALSE(r.Update(6));
  EXPECT_FALSE(r.Update(4));  // improvement resets the count
  EXPECT_FALSE(r.Update(4));
  EXPECT_FALSE(r.Update(4));
  EXPECT_TRUE(r.Update(4));
}

TEST(TrainConfig, DefaultsAndBatchSizes) {
  TrainConfig c;
  EXPECT_EQ(c.learning_rate, 0.001);
  EXPECT_EQ(c.max_epochs, 100);
  EXPECT_EQ(c.early_stop_patience, 10);
  EXPECT_EQ(c.EffectiveBatchSize(), 256);
  c.mode = TrainMode::kListwise;
  EXPECT_EQ(c.EffectiveBatchSize(), 16);
  c.mode = TrainMode::kRegression;
  EXPECT_EQ(c.EffectiveBatchSize(), 256);
  c.batch_size = 3;
  EXPECT_EQ(c.EffectiveBatchSize(), 3);
}

TEST(TrainConfig, JsonRoundTripAndRejections) {
  TrainConfig c;
  c.mode = TrainMode::kListwise;
  c.learning_rate = 0.0025;
  c.max_epochs = 7;
  c.seed = 99;
  c.shuffle = false;
  c.shape = SmallShape();
  const TrainConfig back = TrainConfig::FromJson(c.ToJson());
  EXPECT_EQ(back.ToJson(), c.ToJson());
  EXPECT_EQ(back.Digest(), c.Digest());
  EXPECT_EQ(back.shape, c.shape);
  EXPECT_NE(TrainConfig{}.Digest(), c.Digest());

  EXPECT_EQ(TrainConfig::FromJson("{\"max_epochs\": 3}").max_epochs, 3);
  EXPECT_EQ(CodeOf([] { TrainConfig::FromJson("{\"epochz\": 3}"); }),
            ErrorCode::kInvalidConfig);
  EXPECT_EQ(CodeOf([] { TrainConfig::FromJson("[1]"); }), ErrorCode::kInvalidConfig);
  EXPECT_EQ(CodeOf([] { TrainConfig::FromJson("{\"learning_rate\": 0}"); }),
            ErrorCode::kInvalidConfig);
  EXPECT_EQ(CodeOf([] { TrainConfig::FromJson("{\"validation_fraction\": 1.0}"); }),
            ErrorCode::kInvalidConfig);
  EXPECT_EQ(CodeOf([] { TrainConfig::FromJson("{\"conv_channels\": []}"); }),
            ErrorCode::kInvalidConfig);
}

TEST(ValidationMetric, AllTiedScoresPickLowestHintSet) {
  ScorerParams p = InitParams(1, SmallShape());
  std::vector<double> zeros(p.Flatten().size(), 0.0);
  p.Unflatten(zeros);
  const std::vector<QueryEntry> es = {Entry("a", {9, 1}), Entry("b", {2, 3, 0.5})};
  p.scaler = FitScaler(std::vector<PlanTree>{es[0].candidates[0].plan});
  EXPECT_EQ(ValidationMetric(p, es), 11.0);
}

TEST(ValidationMetric, BoundedByOracleAndWorstCase) {
  const auto es = testing::SynthEntries({3, 4, 5, 0.03});
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    ScorerParams p = InitParams(seed, SmallShape());
    std::vector<const PlanTree*> corpus;
    for (const auto& e : es) {
      for (const auto& c : e.candidates) corpus.push_back(&c.plan);
    }
    p.scaler = FitScaler(std::span<const PlanTree* const>(corpus));
    double oracle = 0.0, worst = 0.0;
    for (const auto& e : es) {
      double lo = INFINITY, hi = 0.0;
      for (const auto& c : e.candidates) {
        lo = std::min(lo, c.latency_ms);
        hi = std::max(hi, c.latency_ms);
      }
      oracle += lo;
      worst += hi;
    }
    const double m = ValidationMetric(p, es);
    EXPECT_GE(m, oracle);
    EXPECT_LE(m, worst);
  }
}

TrainConfig QuickConfig(TrainMode mode, std::uint64_t seed) {
  TrainConfig c;
  c.mode = mode;
  c.max_epochs = 4;
  c.seed = seed;
  c.shape = SmallShape();
  c.validation_fraction = 0.2;
  return c;
}

TEST(Train, SameSeedGivesIdenticalBytes) {
  const auto es = testing::SynthEntries({3, 5, 11, 0.03});
  for (TrainMode mode : {TrainMode::kPairwise, TrainMode::kListwise, TrainMode::kRegression}) {
    const TrainResult a = Train(es, "h", QuickConfig(mode, 5));
    const TrainResult b = Train(es, "h", QuickConfig(mode, 5));
    EXPECT_EQ(SerializeCheckpoint(a.checkpoint), SerializeCheckpoint(b.checkpoint))
        << TrainModeName(mode);
    EXPECT_EQ(a.report.ToJson(), b.report.ToJson());
    const TrainResult c = Train(es, "h", QuickConfig(mode, 6));
    EXPECT_NE(SerializeCheckpoint(a.checkpoint), SerializeCheckpoint(c.checkpoint));
  }
}

TEST(Train, ReportIsConsistent) {
  const auto es = testing::SynthEntries({3, 5, 11, 0.03});
  const TrainResult r = Train(es, "cat", QuickConfig(TrainMode::kPairwise, 2));
  const TrainReport& rep = r.report;
  EXPECT_EQ(rep.num_queries, 15);
  EXPECT_EQ(rep.num_validation_queries, 3);  // floor(0.2 * 15)
  EXPECT_EQ(rep.num_train_queries, 12);
  EXPECT_EQ(static_cast<int>(rep.train_loss.size()), rep.epochs_run);
  EXPECT_EQ(rep.validation_metric.size(), rep.train_loss.size());
  EXPECT_GE(rep.best_epoch, 1);
  EXPECT_LE(rep.best_epoch, rep.epochs_run);
  EXPECT_EQ(r.checkpoint.best_epoch, rep.best_epoch);
  EXPECT_EQ(r.checkpoint.best_validation, rep.validation_metric[rep.best_epoch - 1]);
  EXPECT_EQ(*std::min_element(rep.validation_metric.begin(), rep.validation_metric.end()),
            r.checkpoint.best_validation);
  EXPECT_EQ(r.checkpoint.params.catalog_hash, "cat");
  EXPECT_EQ(r.checkpoint.config_digest, QuickConfig(TrainMode::kPairwise, 2).Digest());
  for (double l : rep.train_loss) EXPECT_TRUE(std::isfinite(l));
  EXPECT_EQ(rep.ToJson().find("wall_seconds"), std::string::npos);
  EXPECT_NE(rep.ToJson(true).find("wall_seconds"), std::string::npos);
}

TEST(Train, FullSetMetricCoversValidationBest) {
  // The validation queries are a subset, so the full-set sum bounds them.
  const auto es = testing::SynthEntries({2, 5, 3, 0.03});
  TrainConfig cfg = QuickConfig(TrainMode::kListwise, 9);
  cfg.validation_fraction = 0.5;
  const TrainResult r = Train(es, "h", cfg);
  const double full = ValidationMetric(r.checkpoint.params, es);
  EXPECT_GE(full, r.checkpoint.best_validation);
}

TEST(Train, SingleQueryHasNoValidationAndKeepsLastEpoch) {
  const std::vector<QueryEntry> es = {Entry("only", {5, 1, 3})};
  TrainConfig cfg = QuickConfig(TrainMode::kPairwise, 1);
  cfg.max_epochs = 3;
  const TrainResult r = Train(es, "h", cfg);
  EXPECT_EQ(r.report.num_validation_queries, 0);
  EXPECT_EQ(r.report.epochs_run, 3);
  EXPECT_EQ(r.report.best_epoch, 3);
}

TEST(Train, EarlyStopsOnFlatLoss) {
  // A single pair of identical plans yields no training pairs: the loss is
  // flat at zero and training stops once patience runs out.
  const std::vector<QueryEntry> es = {Entry("a", {1}), Entry("b", {2})};
  TrainConfig cfg = QuickConfig(TrainMode::kPairwise, 1);
  cfg.max_epochs = 50;
  cfg.early_stop_patience = 4;
  const TrainResult r = Train(es, "h", cfg);
  EXPECT_EQ(r.report.epochs_run, 5);
  EXPECT_TRUE(r.report.early_stopped);
}

TEST(Train, RejectsEmptyAndBadConfig) {
  TrainConfig cfg;
  EXPECT_EQ(CodeOf([&] { Train({}, "h", cfg); }), ErrorCode::kEmptyDataset);
  cfg.max_epochs = 0;
  const std::vector<QueryEntry> es = {Entry("a", {1, 2})};
  EXPECT_EQ(CodeOf([&] { Train(es, "h", cfg); }), ErrorCode::kInvalidConfig);
}

TEST(Train, PairwiseLearnsAnObviousPreference) {
  // Candidate 1 is always ten times faster; after training the scorer
  // should prefer it on held-out queries.
  std::vector<QueryEntry> es;
  for (int q = 0; q < 30; ++q) {
    es.push_back(Entry("q" + std::to_string(q), {10.0 + q, 1.0 + 0.01 * q, 20.0 + q}));
  }
  TrainConfig cfg = QuickConfig(TrainMode::kPairwise, 3);
  cfg.max_epochs = 60;
  cfg.learning_rate = 0.01;
  cfg.batch_size = 16;
  const TrainResult r = Train(es, "h", cfg);
  double oracle = 0.0;
  for (const auto& e : es) oracle += e.candidates[1].latency_ms;
  EXPECT_DOUBLE_EQ(ValidationMetric(r.checkpoint.params, es), oracle);
}

}  // namespace
}  // namespace hintrank
