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

#include "hintrank/ltr.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <utility>

#include "hintrank/status.h"

namespace hintrank::ltr {
namespace {

double LogAddExp(double a, double b) {
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

}  // namespace

double LabelMap(double latency) {
  if (!(latency > 0.0) || !std::isfinite(latency)) {
    throw Error(ErrorCode::kNonPositiveLatency,
                "latency must be positive and finite, got " + std::to_string(latency));
  }
  return 1.0 / latency;
}

std::vector<UniquePlan> DedupPlans(std::span<const PlanObservation> observations) {
  std::vector<UniquePlan> out;
  std::map<std::string, std::size_t> slot;
  std::vector<int> counts;
  for (int i = 0; i < static_cast<int>(observations.size()); ++i) {
    const PlanObservation& o = observations[i];
    auto [it, inserted] = slot.try_emplace(o.fingerprint, out.size());
    if (inserted) {
      out.push_back(UniquePlan{o.fingerprint, 0.0, {}, i});
      counts.push_back(0);
    }
    UniquePlan& u = out[it->second];
    u.latency += o.latency;
    u.hint_set_ids.push_back(o.hint_set_id);
    ++counts[it->second];
  }
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k].latency /= counts[k];
    std::sort(out[k].hint_set_ids.begin(), out[k].hint_set_ids.end());
  }
  return out;
}

RankedList MakeRankedList(std::string query_id, std::span<const double> latencies,
                          std::span<const int> hint_set_ids, int plan_offset) {
  RankedList list{std::move(query_id), {}};
  for (int i = 0; i < static_cast<int>(latencies.size()); ++i) {
    list.items.push_back(RankedItem{plan_offset + i, LabelMap(latencies[i]),
                                    hint_set_ids[i]});
  }
  std::stable_sort(list.items.begin(), list.items.end(),
                   [](const RankedItem& a, const RankedItem& b) {
                     if (a.label != b.label) return a.label > b.label;
                     return a.hint_set_id < b.hint_set_id;
                   });
  return list;
}

std::vector<PairSample> FullBreaking(const RankedList& list) {
  std::vector<PairSample> pairs;
  const auto& items = list.items;
  for (std::size_t i = 0; i < items.size(); ++i) {
    for (std::size_t j = i + 1; j < items.size(); ++j) {
      if (items[i].label > items[j].label) {
        pairs.push_back(PairSample{list.query_id, items[i].plan, items[j].plan});
      }
    }
  }
  return pairs;
}

double Softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double Logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double PlPairProb(double s_i, double s_j) { return Logistic(s_i - s_j); }

LossAndGrad PairwiseLossAndGrad(std::span<const PairSample> pairs,
                                std::span<const double> scores) {
  LossAndGrad out;
  out.grad.assign(scores.size(), 0.0);
  for (const PairSample& p : pairs) {
    const double delta = scores[p.winner] - scores[p.loser];
    out.loss += Softplus(-delta);
    // d/d delta of ln(1 + exp(-delta)) is -(1 - logistic(delta)).
    const double g = -Logistic(-delta);
    out.grad[p.winner] += g;
    out.grad[p.loser] -= g;
  }
  return out;
}

LossAndGrad ListwiseLossAndGrad(std::span<const double> ordered_scores) {
  const std::size_t n = ordered_scores.size();
  if (n == 0) throw Error(ErrorCode::kEmptyList, "listwise loss of an empty list");
  // suffix[j] = ln sum_{m >= j} exp(s_m)
  std::vector<double> suffix(n);
  suffix[n - 1] = ordered_scores[n - 1];
  for (std::size_t j = n - 1; j-- > 0;) {
    suffix[j] = LogAddExp(ordered_scores[j], suffix[j + 1]);
  }
  LossAndGrad out;
  out.grad.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) out.loss += suffix[j] - ordered_scores[j];
  for (std::size_t k = 0; k < n; ++k) {
    double g = -1.0;
    for (std::size_t j = 0; j <= k; ++j) g += std::exp(ordered_scores[k] - suffix[j]);
    out.grad[k] = g;
  }
  return out;
}

LossAndGrad ListwiseLossAndGrad(const RankedList& list, std::span<const double> scores) {
  if (list.items.empty()) throw Error(ErrorCode::kEmptyList, "listwise loss of an empty list");
  std::vector<double> ordered;
  ordered.reserve(list.items.size());
  for (const RankedItem& item : list.items) ordered.push_back(scores[item.plan]);
  LossAndGrad in_order = ListwiseLossAndGrad(ordered);
  LossAndGrad out;
  out.loss = in_order.loss;
  out.grad.assign(scores.size(), 0.0);
  for (std::size_t k = 0; k < list.items.size(); ++k) {
    out.grad[list.items[k].plan] += in_order.grad[k];
  }
  return out;
}

LossAndGrad RegressionLossAndGrad(std::span<const double> targets,
                                  std::span<const double> scores) {
  if (targets.size() != scores.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "one target per score is required");
  }
  LossAndGrad out;
  out.grad.assign(scores.size(), 0.0);
  if (scores.empty()) return out;
  const double n = static_cast<double>(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double r = scores[i] - targets[i];
    out.loss += r * r / n;
    out.grad[i] = 2.0 * r / n;
  }
  return out;
}

RegressionTargets RegressionTargets::Fit(std::span<const double> latencies) {
  if (latencies.empty()) {
    throw Error(ErrorCode::kEmptyDataset, "no latencies to normalize");
  }
  RegressionTargets t;
  t.log_min = t.log_max = std::log1p(latencies[0]);
  for (double l : latencies) {
    t.log_min = std::min(t.log_min, std::log1p(l));
    t.log_max = std::max(t.log_max, std::log1p(l));
  }
  return t;
}

double RegressionTargets::Normalize(double latency) const {
  if (!(log_max > log_min)) return 0.0;
  return (std::log1p(latency) - log_min) / (log_max - log_min);
}

}  // namespace hintrank::ltr
