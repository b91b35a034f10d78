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

// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails. Reports from the end-to-end run are left
// in ./acceptance_reports.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "hintrank/datastore.h"
#include "hintrank/eval.h"
#include "hintrank/gateway.h"
#include "hintrank/hint_catalog.h"
#include "hintrank/io.h"
#include "hintrank/ltr.h"
#include "hintrank/plan_ir.h"
#include "hintrank/scorer.h"
#include "hintrank/status.h"
#include "hintrank/synth.h"
#include "hintrank/tensor_kernel.h"
#include "hintrank/trainer.h"
#include "json.hpp"
#include "test_util.h"

namespace hintrank {
namespace {

using nn::Matrix;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string Num(double v, const char* fmt = "%.3g") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

// ---------------------------------------------------------------- 1

Outcome ParameterCount() {
  const std::int64_t n = ParamCount(ScorerShape{});
  const std::int64_t materialized = ParamCount(InitParams(0));
  return {n == 132353 && materialized == 132353,
          "formula " + std::to_string(n) + ", materialized " + std::to_string(materialized)};
}

// ---------------------------------------------------------------- 2

// Flattens a fixed list of matrices into one parameter vector and back.
struct Packer {
  std::vector<Matrix*> slots;
  std::vector<double> Flat() const {
    std::vector<double> v;
    for (const Matrix* m : slots) {
      for (Eigen::Index j = 0; j < m->cols(); ++j) {
        for (Eigen::Index i = 0; i < m->rows(); ++i) v.push_back((*m)(i, j));
      }
    }
    return v;
  }
  void Load(std::span<const double> v) const {
    std::size_t k = 0;
    for (Matrix* m : slots) {
      for (Eigen::Index j = 0; j < m->cols(); ++j) {
        for (Eigen::Index i = 0; i < m->rows(); ++i) (*m)(i, j) = v[k++];
      }
    }
  }
};

Matrix RandomMatrix(SeededRng& rng, int rows, int cols, double scale = 1.0) {
  Matrix m(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) m(i, j) = scale * (2.0 * rng.Uniform() - 1.0);
  }
  return m;
}

struct EncodedBatch {
  std::vector<EncodedTree> trees;
  std::vector<const EncodedTree*> ptrs;
};

EncodedBatch RandomEncoded(SeededRng& rng, int count, int max_nodes) {
  std::vector<PlanTree> plans;
  for (int i = 0; i < count; ++i) plans.push_back(testing::RandomPlanTree(rng, max_nodes));
  const FeatureScaler scaler = FitScaler(std::span<const PlanTree>(plans));
  EncodedBatch b;
  for (const PlanTree& p : plans) b.trees.push_back(Encode(Binarize(p), scaler));
  for (const EncodedTree& t : b.trees) b.ptrs.push_back(&t);
  return b;
}

double LayerGradchecks(SeededRng& rng) {
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const EncodedBatch eb = RandomEncoded(rng, 3, 15);
    nn::ForestBatch batch = nn::PackForest(eb.ptrs);
    const int n = batch.forest.num_nodes();

    {  // tree convolution, including the input gradient
      nn::TreeConvLayer l(kNodeFeatureDim, 5);
      l.self = RandomMatrix(rng, 5, kNodeFeatureDim);
      l.left = RandomMatrix(rng, 5, kNodeFeatureDim);
      l.right = RandomMatrix(rng, 5, kNodeFeatureDim);
      Matrix bias = RandomMatrix(rng, 5, 1);
      Matrix x = batch.features;
      const Matrix target = RandomMatrix(rng, 5, n);
      Packer p{{&l.self, &l.left, &l.right, &bias, &x}};
      auto loss = [&](std::span<const double> v, std::vector<double>* grad) {
        p.Load(v);
        l.bias = bias.col(0);
        const Matrix r = nn::TreeConvForward(l, batch.forest, x) - target;
        if (grad) {
          const nn::TreeConvGrads g = nn::TreeConvBackward(l, batch.forest, x, r);
          Matrix gs = g.self, gl = g.left, gr = g.right, gb = g.bias, gi = g.input;
          *grad = Packer{{&gs, &gl, &gr, &gb, &gi}}.Flat();
        }
        return 0.5 * r.squaredNorm();
      };
      worst = std::max(worst, nn::FiniteDiffCheck(loss, p.Flat(), 1e-5));
    }
    {  // leaky relu
      Matrix x = RandomMatrix(rng, 4, n);
      const Matrix w = RandomMatrix(rng, 4, n);
      Packer p{{&x}};
      auto loss = [&](std::span<const double> v, std::vector<double>* grad) {
        p.Load(v);
        if (grad) {
          Matrix g = nn::LeakyReluBackward(x, w);
          *grad = Packer{{&g}}.Flat();
        }
        return nn::LeakyRelu(x).cwiseProduct(w).sum();
      };
      worst = std::max(worst, nn::FiniteDiffCheck(loss, p.Flat(), 1e-5));
    }
    {  // dynamic max pooling
      Matrix x = RandomMatrix(rng, 4, n);
      const Matrix w = RandomMatrix(rng, 4, batch.forest.num_trees());
      Packer p{{&x}};
      auto loss = [&](std::span<const double> v, std::vector<double>* grad) {
        p.Load(v);
        const nn::PoolResult r = nn::DynamicMaxPool(batch.forest, x);
        if (grad) {
          Matrix g = nn::DynamicMaxPoolBackward(r, w, n);
          *grad = Packer{{&g}}.Flat();
        }
        return r.pooled.cwiseProduct(w).sum();
      };
      worst = std::max(worst, nn::FiniteDiffCheck(loss, p.Flat(), 1e-5));
    }
    {  // dense layer
      nn::LinearLayer l(6, 3);
      l.weight = RandomMatrix(rng, 3, 6);
      Matrix bias = RandomMatrix(rng, 3, 1);
      Matrix x = RandomMatrix(rng, 6, 4);
      const Matrix target = RandomMatrix(rng, 3, 4);
      Packer p{{&l.weight, &bias, &x}};
      auto loss = [&](std::span<const double> v, std::vector<double>* grad) {
        p.Load(v);
        l.bias = bias.col(0);
        const Matrix r = nn::LinearForward(l, x) - target;
        if (grad) {
          const nn::LinearGrads g = nn::LinearBackward(l, x, r);
          Matrix gw = g.weight, gb = g.bias, gi = g.input;
          *grad = Packer{{&gw, &gb, &gi}}.Flat();
        }
        return 0.5 * r.squaredNorm();
      };
      worst = std::max(worst, nn::FiniteDiffCheck(loss, p.Flat(), 1e-5));
    }
  }
  return worst;
}

using ScoreLoss = std::function<ltr::LossAndGrad(std::span<const double>)>;

// Near-zero gradients are compared against this absolute scale; central
// differences at step 1e-5 carry round-off of roughly 1e-11 per unit loss.
constexpr double kGradientFloor = 1e-6;

// Initial weights plus uniform noise on every value. Biases start at zero,
// which would put all-zero leaves exactly on the activation kink.
ScorerParams JitteredParams(SeededRng& rng, const ScorerShape& shape) {
  ScorerParams p = InitParams(rng.Next(), shape);
  std::vector<double> v = p.Flatten();
  for (double& x : v) x += 0.2 * rng.Uniform() - 0.1;
  p.Unflatten(v);
  return p;
}

double ScorerGradcheck(ScorerParams params, const EncodedBatch& eb, const ScoreLoss& loss_fn) {
  auto loss = [&](std::span<const double> v, std::vector<double>* grad) {
    params.Unflatten(v);
    const ForwardCache cache = ForwardBatch(params, eb.ptrs);
    const ltr::LossAndGrad lg = loss_fn(cache.scores);
    if (grad) *grad = BackwardBatch(params, cache, lg.grad);
    return lg.loss;
  };
  return nn::FiniteDiffCheck(loss, params.Flatten(), 1e-5, kGradientFloor);
}

// Distance from the nearest point where the network is not differentiable:
// a pre-activation at zero or a pooling winner tied with a runner-up.
double KinkDistance(const ScorerParams& params, const EncodedBatch& eb) {
  const ForwardCache cache = ForwardBatch(params, eb.ptrs);
  double d = INFINITY;
  for (const Matrix& pre : cache.conv_pre) d = std::min(d, pre.cwiseAbs().minCoeff());
  for (std::size_t i = 0; i + 1 < cache.mlp_pre.size(); ++i) {
    d = std::min(d, cache.mlp_pre[i].cwiseAbs().minCoeff());
  }
  const nn::Forest& f = cache.batch.forest;
  const Matrix post = nn::LeakyRelu(cache.conv_pre.back());
  for (int t = 0; t < f.num_trees(); ++t) {
    for (Eigen::Index c = 0; c < post.rows(); ++c) {
      const double top = cache.pool.pooled(c, t);
      for (int n = f.tree_begin[t]; n < f.tree_begin[t + 1]; ++n) {
        // Exact ties come from identical subtrees and move together.
        if (post(c, n) != top) d = std::min(d, top - post(c, n));
      }
    }
  }
  return d;
}

Outcome GradientCorrectness() {
  const auto start = Clock::now();
  SeededRng rng(2026);
  const double layer = LayerGradchecks(rng);

  ScorerShape shape;
  shape.conv_channels = {6, 5, 4};
  shape.mlp_hidden = {3};
  double worst[3] = {0.0, 0.0, 0.0};
  for (int size = 1; size <= 15; ++size) {
    for (int rep = 0; rep < 2; ++rep) {
      // Three trees of at most `size` nodes each.
      const EncodedBatch eb = RandomEncoded(rng, 3, size);
      // Central differences straddling a kink say nothing about the
      // analytic gradient, so parameters are redrawn until none is near.
      ScorerParams params = JitteredParams(rng, shape);
      for (int tries = 0; KinkDistance(params, eb) < 1e-3; ++tries) {
        if (tries == 1000) throw Error(ErrorCode::kNonFiniteGradient, "no kink-free point found");
        params = JitteredParams(rng, shape);
      }
      const std::vector<ltr::PairSample> pairs = {{"q", 0, 1}, {"q", 1, 2}, {"q", 0, 2}};
      ltr::RankedList list{"q", {{0, 3.0, 0}, {1, 2.0, 1}, {2, 1.0, 2}}};
      const std::vector<double> targets = {rng.Uniform(), rng.Uniform(), rng.Uniform()};
      worst[0] = std::max(worst[0], ScorerGradcheck(params, eb, [&](std::span<const double> s) {
                            return ltr::PairwiseLossAndGrad(pairs, s);
                          }));
      worst[1] = std::max(worst[1], ScorerGradcheck(params, eb, [&](std::span<const double> s) {
                            return ltr::ListwiseLossAndGrad(list, s);
                          }));
      worst[2] = std::max(worst[2], ScorerGradcheck(params, eb, [&](std::span<const double> s) {
                            return ltr::RegressionLossAndGrad(targets, s);
                          }));
    }
  }
  const double secs = Seconds(start);
  const bool pass = layer < 1e-6 && worst[0] < 1e-4 && worst[1] < 1e-4 && worst[2] < 1e-4 &&
                    secs < 30.0;
  return {pass, "layers " + Num(layer) + " (< 1e-6); scorer pairwise " + Num(worst[0]) +
                    ", listwise " + Num(worst[1]) + ", regression " + Num(worst[2]) +
                    " (< 1e-4); " + Num(secs, "%.1f") + " s"};
}

// ---------------------------------------------------------------- 3

Outcome LossIdentities() {
  SeededRng rng(3);
  double e_ln2 = 0.0, e_two = 0.0, e_fact = 0.0, e_shift = 0.0;
  const std::vector<ltr::PairSample> one = {{"q", 0, 1}};
  for (int t = 0; t < 200; ++t) {
    const double s = 20.0 * rng.Uniform() - 10.0;
    const std::vector<double> tied = {s, s};
    e_ln2 = std::max(e_ln2, std::abs(ltr::PairwiseLossAndGrad(one, tied).loss - std::log(2.0)));

    const std::vector<double> two = {10.0 * rng.Uniform() - 5.0, 10.0 * rng.Uniform() - 5.0};
    e_two = std::max(e_two, std::abs(ltr::ListwiseLossAndGrad(two).loss -
                                     ltr::PairwiseLossAndGrad(one, two).loss));

    const int n = 2 + static_cast<int>(rng.Below(9));
    std::vector<double> scores(n);
    for (double& v : scores) v = 6.0 * rng.Uniform() - 3.0;
    std::vector<double> shifted = scores;
    const double c = 100.0 * rng.Uniform() - 50.0;
    for (double& v : shifted) v += c;
    e_shift = std::max(e_shift, std::abs(ltr::ListwiseLossAndGrad(scores).loss -
                                         ltr::ListwiseLossAndGrad(shifted).loss));
    std::vector<ltr::PairSample> pairs;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) pairs.push_back({"q", i, j});
    }
    e_shift = std::max(e_shift, std::abs(ltr::PairwiseLossAndGrad(pairs, scores).loss -
                                         ltr::PairwiseLossAndGrad(pairs, shifted).loss));
  }
  for (int n = 1; n <= 20; ++n) {
    double log_fact = 0.0;
    for (int k = 2; k <= n; ++k) log_fact += std::log(static_cast<double>(k));
    for (double s : {-3.0, 0.0, 7.5}) {
      const std::vector<double> equal(n, s);
      e_fact = std::max(e_fact, std::abs(ltr::ListwiseLossAndGrad(equal).loss - log_fact));
    }
  }
  const bool pass = e_ln2 <= 1e-12 && e_two <= 1e-12 && e_fact <= 1e-9 && e_shift <= 1e-9;
  return {pass, "ln2 " + Num(e_ln2) + ", two-item " + Num(e_two) + ", ln(n!) " + Num(e_fact) +
                    ", translation " + Num(e_shift)};
}

// ---------------------------------------------------------------- 4

Outcome SignProperties() {
  int violations = 0;
  int checks = 0;
  const std::vector<ltr::PairSample> one = {{"q", 0, 1}};
  double prev = INFINITY;
  for (int k = -1000; k <= 1000; ++k) {
    const double delta = k / 100.0;
    const std::vector<double> s = {delta, 0.0};
    const double l = ltr::PairwiseLossAndGrad(one, s).loss;
    if (k > -1000) {
      ++checks;
      if (!(l < prev)) ++violations;
    }
    prev = l;
  }
  SeededRng rng(4);
  for (int t = 0; t < 100; ++t) {
    const int n = 2 + static_cast<int>(rng.Below(9));
    std::vector<double> base(n);
    for (double& v : base) v = 4.0 * rng.Uniform() - 2.0;
    std::sort(base.begin(), base.end(), std::greater<>());
    for (int gap = 0; gap + 1 < n; ++gap) {
      // Widen the gap between positions gap and gap + 1 by lifting the
      // leading block.
      double last = ltr::ListwiseLossAndGrad(base).loss;
      std::vector<double> s = base;
      for (int step = 0; step < 20; ++step) {
        for (int i = 0; i <= gap; ++i) s[i] += 0.1;
        const double l = ltr::ListwiseLossAndGrad(s).loss;
        ++checks;
        if (!(l < last)) ++violations;
        last = l;
      }
    }
  }
  return {violations == 0,
          std::to_string(violations) + " violations in " + std::to_string(checks) + " steps"};
}

// ---------------------------------------------------------------- 5

Outcome RankBreaking() {
  SeededRng rng(5);
  int failures = 0;
  int lists = 0;
  for (int n = 1; n <= 12; ++n) {
    for (int t = 0; t < 20; ++t) {
      ++lists;
      // Distinct latencies in random order.
      std::vector<double> latencies(n);
      std::iota(latencies.begin(), latencies.end(), 1.0);
      rng.Shuffle(latencies.begin(), latencies.end());
      for (double& l : latencies) l *= 1.5;
      std::vector<int> ids(n);
      std::iota(ids.begin(), ids.end(), 0);
      const ltr::RankedList list = ltr::MakeRankedList("q", latencies, ids);
      const std::vector<ltr::PairSample> pairs = ltr::FullBreaking(list);

      // Brute force: the true order by latency and every ordered pair of it.
      std::vector<int> order(n);
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(),
                [&](int a, int b) { return latencies[a] < latencies[b]; });
      std::set<std::pair<int, int>> expected;
      for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) expected.insert({order[a], order[b]});
      }
      std::set<std::pair<int, int>> got;
      for (const auto& p : pairs) got.insert({p.winner, p.loser});
      bool ok = static_cast<int>(pairs.size()) == n * (n - 1) / 2 && got == expected;

      // Transitive closure of the emitted pairs must be the total order.
      std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
      for (const auto& p : pairs) reach[p.winner][p.loser] = true;
      for (int k = 0; k < n; ++k) {
        for (int i = 0; i < n; ++i) {
          for (int j = 0; j < n; ++j) {
            if (reach[i][k] && reach[k][j]) reach[i][j] = true;
          }
        }
      }
      for (int a = 0; a < n && ok; ++a) {
        for (int b = 0; b < n; ++b) {
          if (a != b && reach[order[a]][order[b]] != (a < b)) ok = false;
        }
      }
      // For small lists, every permutation consistent with the pairs is
      // enumerated; only the input order may remain.
      if (ok && n <= 7) {
        std::vector<int> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        int consistent = 0;
        do {
          std::vector<int> pos(n);
          for (int i = 0; i < n; ++i) pos[perm[i]] = i;
          bool fits = true;
          for (const auto& p : pairs) fits = fits && pos[p.winner] < pos[p.loser];
          if (fits) {
            ++consistent;
            if (perm != order) ok = false;
          }
        } while (std::next_permutation(perm.begin(), perm.end()));
        if (consistent != 1) ok = false;
      }
      if (!ok) ++failures;
    }
  }
  return {failures == 0, std::to_string(lists) + " rankings of size 1..12, " +
                             std::to_string(failures) + " mismatches"};
}

// ---------------------------------------------------------------- 6 and 10

struct EndToEnd {
  std::vector<QueryEntry> entries;
  SplitResult split;
  std::vector<QueryEntry> train;
  std::vector<QueryEntry> test;
  TrainResult pairwise;
  TrainResult listwise;
  bool ready = false;
};

EndToEnd& Workload() {
  static EndToEnd w;
  return w;
}

Outcome SyntheticLearning() {
  EndToEnd& w = Workload();
  w.entries = testing::SynthEntries(SynthOptions{});
  ScenarioSpec spec;
  spec.scenario = Scenario::kRepeat;
  spec.selection = Selection::kRand;
  spec.holdout = 5;
  spec.seed = 1;
  w.split = MakeSplit(w.entries, spec);
  w.train = SelectQueries(w.entries, w.split.train);
  w.test = SelectQueries(w.entries, w.split.test);
  const std::string hash = SyntheticCatalog().Hash();

  TrainConfig cfg;
  cfg.seed = 3;
  const auto start = Clock::now();
  cfg.mode = TrainMode::kPairwise;
  w.pairwise = Train(w.train, hash, cfg);
  const double pw_secs = Seconds(start);
  const auto mid = Clock::now();
  cfg.mode = TrainMode::kListwise;
  w.listwise = Train(w.train, hash, cfg);
  const double lw_secs = Seconds(mid);
  w.ready = true;

  cfg.mode = TrainMode::kRegression;
  cfg.max_epochs = 20;
  const TrainResult reg = Train(w.train, hash, cfg);
  bool reg_ok = reg.report.train_loss.back() < reg.report.train_loss.front();
  for (double l : reg.report.train_loss) reg_ok = reg_ok && std::isfinite(l);

  std::string detail = std::to_string(w.entries.size()) + " queries, " +
                       std::to_string(SyntheticCatalog().size()) + " hint sets, " +
                       std::to_string(w.test.size()) + " held out";
  bool pass = w.entries.size() >= 200 && SyntheticCatalog().size() == 8 && reg_ok;
  for (const auto& [name, result, secs] :
       {std::tuple{"pairwise", &w.pairwise, pw_secs}, {"listwise", &w.listwise, lw_secs}}) {
    const double acc = PairwiseOrderAccuracy(result->checkpoint.params, w.test);
    const EvalReport rep = Evaluate(result->checkpoint.params, w.test);
    const double ratio = rep.total_selected / rep.total_oracle;
    pass = pass && acc >= 0.85 && ratio <= 1.10 && secs < 300.0;
    detail += std::string("; ") + name + " accuracy " + Num(acc, "%.3f") + ", selected/oracle " +
              Num(ratio, "%.3f") + ", " + std::to_string(result->report.epochs_run) +
              " epochs in " + Num(secs, "%.1f") + " s";
  }
  detail += "; regression loss " + Num(reg.report.train_loss.front(), "%.4f") + " -> " +
            Num(reg.report.train_loss.back(), "%.4f");
  return {pass, detail};
}

Outcome ReportShapes() {
  EndToEnd& w = Workload();
  if (!w.ready) return {false, "end-to-end run did not complete"};
  const std::filesystem::path dir = "acceptance_reports";
  std::filesystem::create_directories(dir);
  const std::string hash = SyntheticCatalog().Hash();
  bool ok = true;
  std::string detail;
  std::string tables;

  struct Setting {
    Scenario scenario;
    Selection selection;
    int holdout;
  };
  for (const Setting& s : {Setting{Scenario::kAdhoc, Selection::kRand, 2},
                           Setting{Scenario::kAdhoc, Selection::kSlow, 2},
                           Setting{Scenario::kRepeat, Selection::kRand, 5},
                           Setting{Scenario::kRepeat, Selection::kSlow, 5}}) {
    ScenarioSpec spec{s.scenario, s.selection, s.holdout, 1};
    const SplitResult split = MakeSplit(w.entries, spec);
    const std::string label =
        std::string(ScenarioName(s.scenario)) + "-" + std::string(SelectionName(s.selection));
    const ScorerParams* params = nullptr;
    TrainResult quick;
    if (s.scenario == Scenario::kRepeat && s.selection == Selection::kRand) {
      params = &w.pairwise.checkpoint.params;
    } else {
      TrainConfig cfg;
      cfg.seed = 3;
      cfg.max_epochs = 5;
      quick = Train(SelectQueries(w.entries, split.train), hash, cfg);
      params = &quick.checkpoint.params;
    }
    EvalReport rep = Evaluate(*params, SelectQueries(w.entries, split.test));
    rep.label = label;
    WriteFile(dir / (label + ".json"), rep.ToJson());
    tables += rep.ToTable() + "\n";
    const auto j = nlohmann::json::parse(rep.ToJson());
    ok = ok && j.contains("speedup") && j.contains("regressions") && j["label"] == label &&
         j["regressions"].is_number_integer() && j["templates"].is_array();
    detail += label + " speedup " + Num(rep.speedup, "%.2f") + " (" +
              std::to_string(rep.regressions) + " regressions); ";
  }
  WriteFile(dir / "evaluation.txt", tables);

  const SpectrumReport spec =
      EmbeddingSpectrum(w.pairwise.checkpoint.params, UniquePlans(w.entries));
  const std::string csv = spec.ToCsv();
  WriteFile(dir / "spectrum.csv", csv);
  WriteFile(dir / "spectrum.json", spec.ToJson());
  ok = ok && csv.rfind("k,sigma,log10_sigma\n", 0) == 0 &&
       std::count(csv.begin(), csv.end(), '\n') == 65;
  detail += "spectrum over " + std::to_string(spec.num_embeddings) + " plans, " +
            std::to_string(spec.collapse_count) + " collapsed; written to " + dir.string();
  return {ok, detail};
}

// ---------------------------------------------------------------- 7

Outcome SpectrumCorrectness() {
  SeededRng rng(7);
  std::string detail;
  bool ok = true;
  double worst_trace = 0.0;
  for (int k : {1, 8, 32, 64}) {
    for (int t = 0; t < 3; ++t) {
      const Matrix e = RandomMatrix(rng, 64, k) * RandomMatrix(rng, k, 256);
      const SpectrumReport s = SpectrumFromEmbeddings(e);
      if (s.collapse_count != 64 - k) {
        ok = false;
        detail += "k=" + std::to_string(k) + " gave " + std::to_string(s.collapse_count) + "; ";
      }
      // Trace from explicit loops over the centred data.
      double trace = 0.0;
      for (int r = 0; r < 64; ++r) {
        double mean = 0.0;
        for (int c = 0; c < e.cols(); ++c) mean += e(r, c);
        mean /= static_cast<double>(e.cols());
        for (int c = 0; c < e.cols(); ++c) trace += (e(r, c) - mean) * (e(r, c) - mean);
      }
      trace /= static_cast<double>(e.cols());
      const double sum = std::accumulate(s.singular_values.begin(), s.singular_values.end(), 0.0);
      worst_trace = std::max(worst_trace, std::abs(sum - trace) / trace);
    }
  }
  ok = ok && worst_trace <= 1e-9;
  return {ok, detail + "collapse counts for k in {1, 8, 32, 64} checked; trace rel. error " +
                  Num(worst_trace)};
}

// ---------------------------------------------------------------- 8

struct RunArtifacts {
  std::string split, checkpoint, report, eval, spectrum;
  bool operator==(const RunArtifacts&) const = default;
};

RunArtifacts DeterministicRun(const std::vector<QueryEntry>& entries) {
  RunArtifacts a;
  const SplitResult split = MakeSplit(entries, {Scenario::kAdhoc, Selection::kRand, 1, 11});
  a.split = SplitToJson(split);
  TrainConfig cfg;
  cfg.seed = 12;
  cfg.max_epochs = 3;
  const TrainResult r = Train(SelectQueries(entries, split.train), "h", cfg);
  a.checkpoint = SerializeCheckpoint(r.checkpoint);
  a.report = r.report.ToJson();
  a.eval = Evaluate(r.checkpoint.params, SelectQueries(entries, split.test)).ToJson();
  a.spectrum = EmbeddingSpectrum(r.checkpoint.params, UniquePlans(entries)).ToCsv();
  return a;
}

Outcome Determinism() {
  const auto first_data = testing::SynthRecords({3, 8, 21, 0.03});
  const auto second_data = testing::SynthRecords({3, 8, 21, 0.03});
  const bool data_same = first_data == second_data;
  const auto entries = GroupQueries(first_data, SyntheticCatalog());
  const RunArtifacts a = DeterministicRun(entries);
  const RunArtifacts b = DeterministicRun(entries);
  std::string diff;
  if (a.split != b.split) diff += " split";
  if (a.checkpoint != b.checkpoint) diff += " checkpoint";
  if (a.report != b.report) diff += " report";
  if (a.eval != b.eval) diff += " evaluation";
  if (a.spectrum != b.spectrum) diff += " spectrum";
  if (!data_same) diff += " dataset";
  return {diff.empty(), diff.empty()
                            ? "dataset, split, checkpoint (" +
                                  std::to_string(a.checkpoint.size()) +
                                  " bytes), reports byte-identical"
                            : "differs:" + diff};
}

// ---------------------------------------------------------------- 9

Outcome ReplayRoundTrip() {
  testing::TempDir dir;
  SimulatedSource live({4, 5, 17, 0.03});
  const Catalog catalog = SyntheticCatalog();
  const auto clock = [] { return std::string("2026-01-01T00:00:00Z"); };
  const auto queries = live.Queries();
  Collect(queries, catalog, live, dir.file("a.jsonl"), dir.file("fa.jsonl"), clock);
  auto replay = ReplaySource::FromFile(dir.file("a.jsonl"));
  const auto replay_queries = replay->Queries();
  Collect(replay_queries, catalog, *replay, dir.file("b.jsonl"), dir.file("fb.jsonl"), clock);
  const auto a = GroupQueries(LoadRecords(dir.file("a.jsonl")), catalog);
  const auto b = GroupQueries(LoadRecords(dir.file("b.jsonl")), catalog);
  const bool bytes = ReadFile(dir.file("a.jsonl")) == ReadFile(dir.file("b.jsonl"));
  return {a == b && bytes && !a.empty(),
          std::to_string(a.size()) + " queries regrouped identically, record files " +
              (bytes ? "byte-identical" : "differ")};
}

}  // namespace
}  // namespace hintrank

// Criterion numbers on the command line restrict the run to those.
int main(int argc, char** argv) {
  using hintrank::Outcome;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"parameter count", hintrank::ParameterCount},
      {"gradient correctness", hintrank::GradientCorrectness},
      {"loss identities", hintrank::LossIdentities},
      {"loss sign properties", hintrank::SignProperties},
      {"rank breaking", hintrank::RankBreaking},
      {"synthetic end-to-end learning", hintrank::SyntheticLearning},
      {"spectrum correctness", hintrank::SpectrumCorrectness},
      {"determinism", hintrank::Determinism},
      {"replay round trip", hintrank::ReplayRoundTrip},
      {"report shapes", hintrank::ReportShapes},
  };
  std::set<std::size_t> only;
  for (int a = 1; a < argc; ++a) only.insert(std::stoul(argv[a]));
  int failed = 0;
  int ran = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!only.empty() && !only.count(i + 1)) continue;
    ++ran;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << (i + 1) << ": "
              << criteria[i].first << ": " << o.detail << std::endl;
  }
  std::cout << (ran - failed) << "/" << ran << " criteria passed"
            << std::endl;
  return failed == 0 ? 0 : 1;
}
