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

// Evaluation of a trained scorer on held-out queries (speedup over the
// default plan, regressions, the per-query optimum) and the singular value
// spectrum of its plan embeddings.

#ifndef HINTRANK_EVAL_H_
#define HINTRANK_EVAL_H_

#include <span>
#include <string>
#include <vector>

#include "hintrank/datastore.h"
#include "hintrank/scorer.h"
#include "hintrank/tensor_kernel.h"

namespace hintrank {

struct EvalRow {
  std::string query_id;
  std::string template_id;
  double default_latency = 0.0;
  int selected_hint = 0;
  double selected_latency = 0.0;
  double oracle_latency = 0.0;
};

struct TemplateRow {
  std::string template_id;
  int queries = 0;
  double mean_default = 0.0;
  double mean_selected = 0.0;
  double mean_oracle = 0.0;
};

struct EvalReport {
  std::string label;  // e.g. "adhoc-rand"; empty when unknown
  std::vector<EvalRow> rows;
  std::vector<TemplateRow> templates;  // sorted by template id
  double total_default = 0.0;
  double total_selected = 0.0;
  double total_oracle = 0.0;
  double speedup = 0.0;           // total_default / total_selected
  double oracle_speedup = 0.0;    // total_default / total_oracle
  double template_speedup = 0.0;  // over per-template mean latencies
  int regressions = 0;            // selected strictly slower than default

  std::string ToJson() const;
  std::string ToTable() const;
};

// default_total / selected_total. Throws NonPositiveTotal.
double Speedup(double default_total, double selected_total);

// Throws EmptyTestSet, MissingLatency.
EvalReport Evaluate(const ScorerParams& params, std::span<const QueryEntry> test);

// Fraction of strictly ordered candidate pairs (by latency) whose scores are
// ordered the same way. Ties in score count as wrong.
double PairwiseOrderAccuracy(const ScorerParams& params,
                             std::span<const QueryEntry> entries);

inline constexpr double kCollapseThreshold = 1e-7;

struct SpectrumReport {
  int num_embeddings = 0;
  std::vector<double> singular_values;  // descending
  std::vector<double> log10_values;     // -inf for exact zeros
  double trace = 0.0;                   // trace of the covariance
  double threshold = kCollapseThreshold;
  int collapse_count = 0;               // values below threshold

  std::string ToJson() const;
  // Header "k,sigma,log10_sigma", one row per value, k from 1.
  std::string ToCsv() const;
};

// Covariance (1/M) sum (z - mean)(z - mean)^T of the columns of `embeddings`
// and its singular values. Throws TooFewPlans for fewer than 2 columns.
SpectrumReport SpectrumFromEmbeddings(const nn::Matrix& embeddings);

// Plans deduplicated by fingerprint across all queries, first occurrence kept.
std::vector<PlanTree> UniquePlans(std::span<const QueryEntry> entries);

SpectrumReport EmbeddingSpectrum(const ScorerParams& params,
                                 std::span<const PlanTree> plans);

}  // namespace hintrank

#endif  // HINTRANK_EVAL_H_
