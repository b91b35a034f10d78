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

// Ranking losses over per-plan scores under the Plackett-Luce model, the
// rank-breaking that turns latency orders into pairwise samples, and an L2
// regression baseline.
//
// Plans are referred to by integer indices into whatever score vector the
// caller passes; gradients come back in the same indexing.

#ifndef HINTRANK_LTR_H_
#define HINTRANK_LTR_H_

#include <span>
#include <string>
#include <vector>

namespace hintrank::ltr {

struct LossAndGrad {
  double loss = 0.0;
  std::vector<double> grad;  // one entry per score
};

// 1 / latency. Throws NonPositiveLatency.
double LabelMap(double latency);

struct RankedItem {
  int plan = 0;       // index into the score vector
  double label = 0.0;  // 1 / latency
  int hint_set_id = 0;  // lowest contributing id; breaks label ties
};

// Items ordered best first: label descending, then hint_set_id ascending.
struct RankedList {
  std::string query_id;
  std::vector<RankedItem> items;
};

struct PlanObservation {
  std::string fingerprint;
  double latency = 0.0;
  int hint_set_id = 0;
};

struct UniquePlan {
  std::string fingerprint;
  double latency = 0.0;           // mean over the group
  std::vector<int> hint_set_ids;  // ascending
  int first_index = 0;            // first observation in the group
};

// Collapses observations sharing a fingerprint into one entry with the mean
// latency. Output is ordered by first appearance.
std::vector<UniquePlan> DedupPlans(std::span<const PlanObservation> observations);

// Builds a RankedList from per-plan latencies (plan i has latencies[i]).
RankedList MakeRankedList(std::string query_id, std::span<const double> latencies,
                          std::span<const int> hint_set_ids, int plan_offset = 0);

struct PairSample {
  std::string query_id;
  int winner = 0;
  int loser = 0;
};

// Every (better, worse) pair of the list. Items with equal labels are not
// paired with each other.
std::vector<PairSample> FullBreaking(const RankedList& list);

// exp(si) / (exp(si) + exp(sj)), computed without overflow.
double PlPairProb(double s_i, double s_j);

// ln(1 + exp(x)) without overflow.
double Softplus(double x);
// 1 / (1 + exp(-x)) without overflow.
double Logistic(double x);

// Sum over pairs of -ln PlPairProb(s_winner, s_loser).
LossAndGrad PairwiseLossAndGrad(std::span<const PairSample> pairs,
                                std::span<const double> scores);

// Negative Plackett-Luce log-likelihood of the list's order (listMLE).
// Throws EmptyList.
LossAndGrad ListwiseLossAndGrad(const RankedList& list, std::span<const double> scores);

// Same loss for scores already in best-first order.
LossAndGrad ListwiseLossAndGrad(std::span<const double> ordered_scores);

// Mean squared error between scores and targets.
LossAndGrad RegressionLossAndGrad(std::span<const double> targets,
                                  std::span<const double> scores);

// Min-max normalization of ln(1 + latency) fitted on a training set.
struct RegressionTargets {
  double log_min = 0.0;
  double log_max = 0.0;

  static RegressionTargets Fit(std::span<const double> latencies);
  double Normalize(double latency) const;
};

}  // namespace hintrank::ltr

#endif  // HINTRANK_LTR_H_
