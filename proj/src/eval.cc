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

#include "hintrank/eval.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <set>

#include <Eigen/Eigenvalues>

#include "hintrank/ltr.h"
#include "hintrank/status.h"
#include "json.hpp"

namespace hintrank {
namespace {

using nlohmann::ordered_json;

std::string Fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string Pad(const std::string& s, std::size_t width, bool right) {
  if (s.size() >= width) return s;
  const std::string fill(width - s.size(), ' ');
  return right ? fill + s : s + fill;
}

// Renders rows as aligned columns; first column left-aligned, rest right.
std::string AlignedTable(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& row : rows) {
    width.resize(std::max(width.size(), row.size()), 0);
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::string out;
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += "  ";
      out += Pad(row[c], width[c], c > 0);
    }
    out += '\n';
  }
  return out;
}

std::vector<const EncodedTree*> Pointers(const std::vector<EncodedTree>& trees) {
  std::vector<const EncodedTree*> out;
  out.reserve(trees.size());
  for (const EncodedTree& t : trees) out.push_back(&t);
  return out;
}

}  // namespace

double Speedup(double default_total, double selected_total) {
  if (!(default_total > 0.0) || !(selected_total > 0.0)) {
    throw Error(ErrorCode::kNonPositiveTotal, "speedup needs positive latency totals");
  }
  return default_total / selected_total;
}

EvalReport Evaluate(const ScorerParams& params, std::span<const QueryEntry> test) {
  if (test.empty()) throw Error(ErrorCode::kEmptyTestSet, "no test queries to evaluate");
  EvalReport report;
  std::map<std::string, std::vector<const EvalRow*>> by_template;
  report.rows.reserve(test.size());
  for (const QueryEntry& q : test) {
    if (q.candidates.empty() || !(q.default_latency > 0.0)) {
      throw Error(ErrorCode::kMissingLatency, "query " + q.query_id + " lacks a default latency");
    }
    std::vector<EncodedTree> trees;
    std::vector<int> ids;
    double oracle = std::numeric_limits<double>::infinity();
    for (const CandidatePlan& c : q.candidates) {
      if (!(c.latency_ms > 0.0)) {
        throw Error(ErrorCode::kMissingLatency,
                    "query " + q.query_id + " has a candidate without a latency");
      }
      trees.push_back(Encode(Binarize(c.plan), params.scaler));
      ids.push_back(c.hint_set_ids.front());
      oracle = std::min(oracle, c.latency_ms);
    }
    const std::vector<double> scores = ScoreBatch(params, Pointers(trees));
    const int pick = ArgmaxWithTieBreak(scores, ids);
    EvalRow row;
    row.query_id = q.query_id;
    row.template_id = q.template_id;
    row.default_latency = q.default_latency;
    row.selected_hint = ids[pick];
    row.selected_latency = q.candidates[pick].latency_ms;
    row.oracle_latency = oracle;
    report.total_default += row.default_latency;
    report.total_selected += row.selected_latency;
    report.total_oracle += row.oracle_latency;
    if (row.selected_latency > row.default_latency) ++report.regressions;
    report.rows.push_back(std::move(row));
  }
  for (const EvalRow& row : report.rows) by_template[row.template_id].push_back(&row);
  double template_default = 0.0;
  double template_selected = 0.0;
  for (const auto& [id, rows] : by_template) {
    TemplateRow t;
    t.template_id = id;
    t.queries = static_cast<int>(rows.size());
    for (const EvalRow* r : rows) {
      t.mean_default += r->default_latency;
      t.mean_selected += r->selected_latency;
      t.mean_oracle += r->oracle_latency;
    }
    t.mean_default /= t.queries;
    t.mean_selected /= t.queries;
    t.mean_oracle /= t.queries;
    template_default += t.mean_default;
    template_selected += t.mean_selected;
    report.templates.push_back(std::move(t));
  }
  report.speedup = Speedup(report.total_default, report.total_selected);
  report.oracle_speedup = Speedup(report.total_default, report.total_oracle);
  report.template_speedup = Speedup(template_default, template_selected);
  return report;
}

std::string EvalReport::ToJson() const {
  ordered_json j;
  j["label"] = label;
  j["queries"] = rows.size();
  j["speedup"] = speedup;
  j["oracle_speedup"] = oracle_speedup;
  j["template_speedup"] = template_speedup;
  j["regressions"] = regressions;
  j["total_default_ms"] = total_default;
  j["total_selected_ms"] = total_selected;
  j["total_oracle_ms"] = total_oracle;
  ordered_json per_template = ordered_json::array();
  for (const TemplateRow& t : templates) {
    per_template.push_back(ordered_json{{"template_id", t.template_id},
                                        {"queries", t.queries},
                                        {"mean_default_ms", t.mean_default},
                                        {"mean_selected_ms", t.mean_selected},
                                        {"mean_oracle_ms", t.mean_oracle}});
  }
  j["templates"] = per_template;
  ordered_json per_query = ordered_json::array();
  for (const EvalRow& r : rows) {
    per_query.push_back(ordered_json{{"query_id", r.query_id},
                                     {"template_id", r.template_id},
                                     {"default_ms", r.default_latency},
                                     {"selected_hint", r.selected_hint},
                                     {"selected_ms", r.selected_latency},
                                     {"oracle_ms", r.oracle_latency}});
  }
  j["rows"] = per_query;
  return j.dump(2) + "\n";
}

std::string EvalReport::ToTable() const {
  std::vector<std::vector<std::string>> summary = {
      {"setting", "queries", "speedup", "oracle", "regressions"},
      {label.empty() ? "-" : label, std::to_string(rows.size()), Fixed(speedup, 2),
       Fixed(oracle_speedup, 2), std::to_string(regressions)}};
  std::vector<std::vector<std::string>> per_template = {
      {"template", "queries", "default_ms", "selected_ms", "oracle_ms"}};
  for (const TemplateRow& t : templates) {
    per_template.push_back({t.template_id, std::to_string(t.queries),
                            Fixed(t.mean_default, 1), Fixed(t.mean_selected, 1),
                            Fixed(t.mean_oracle, 1)});
  }
  return AlignedTable(summary) + "\n" + AlignedTable(per_template);
}

double PairwiseOrderAccuracy(const ScorerParams& params,
                             std::span<const QueryEntry> entries) {
  std::int64_t correct = 0;
  std::int64_t total = 0;
  for (const QueryEntry& q : entries) {
    std::vector<EncodedTree> trees;
    std::vector<double> latencies;
    std::vector<int> ids;
    for (const CandidatePlan& c : q.candidates) {
      trees.push_back(Encode(Binarize(c.plan), params.scaler));
      latencies.push_back(c.latency_ms);
      ids.push_back(c.hint_set_ids.front());
    }
    const std::vector<double> scores = ScoreBatch(params, Pointers(trees));
    for (const ltr::PairSample& p :
         ltr::FullBreaking(ltr::MakeRankedList(q.query_id, latencies, ids))) {
      ++total;
      if (scores[p.winner] > scores[p.loser]) ++correct;
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

SpectrumReport SpectrumFromEmbeddings(const nn::Matrix& embeddings) {
  const Eigen::Index m = embeddings.cols();
  if (m < 2) {
    throw Error(ErrorCode::kTooFewPlans, "spectrum needs at least 2 plan embeddings");
  }
  const nn::Vector mean = embeddings.rowwise().mean();
  const nn::Matrix centered = embeddings.colwise() - mean;
  const nn::Matrix cov = (centered * centered.transpose()) / static_cast<double>(m);
  Eigen::SelfAdjointEigenSolver<nn::Matrix> solver(cov, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::kDimensionMismatch, "eigen decomposition did not converge");
  }
  SpectrumReport r;
  r.num_embeddings = static_cast<int>(m);
  r.trace = cov.trace();
  // For a symmetric PSD matrix the singular values are the absolute
  // eigenvalues.
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    r.singular_values.push_back(std::abs(solver.eigenvalues()(i)));
  }
  std::sort(r.singular_values.begin(), r.singular_values.end(), std::greater<>());
  for (double s : r.singular_values) {
    r.log10_values.push_back(s > 0.0 ? std::log10(s)
                                     : -std::numeric_limits<double>::infinity());
    if (s < r.threshold) ++r.collapse_count;
  }
  return r;
}

std::string SpectrumReport::ToJson() const {
  ordered_json j;
  j["num_embeddings"] = num_embeddings;
  j["dimensions"] = singular_values.size();
  j["threshold"] = threshold;
  j["collapse_count"] = collapse_count;
  j["trace"] = trace;
  j["singular_values"] = singular_values;
  ordered_json logs = ordered_json::array();
  for (double v : log10_values) {
    if (std::isfinite(v)) {
      logs.push_back(v);
    } else {
      logs.push_back(nullptr);
    }
  }
  j["log10_singular_values"] = logs;
  return j.dump(2) + "\n";
}

std::string SpectrumReport::ToCsv() const {
  std::string out = "k,sigma,log10_sigma\n";
  char buf[128];
  for (std::size_t k = 0; k < singular_values.size(); ++k) {
    if (std::isfinite(log10_values[k])) {
      std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g\n", k + 1, singular_values[k],
                    log10_values[k]);
    } else {
      std::snprintf(buf, sizeof(buf), "%zu,%.17g,-inf\n", k + 1, singular_values[k]);
    }
    out += buf;
  }
  return out;
}

std::vector<PlanTree> UniquePlans(std::span<const QueryEntry> entries) {
  std::set<std::string> seen;
  std::vector<PlanTree> out;
  for (const QueryEntry& q : entries) {
    for (const CandidatePlan& c : q.candidates) {
      if (seen.insert(c.fingerprint).second) out.push_back(c.plan);
    }
  }
  return out;
}

SpectrumReport EmbeddingSpectrum(const ScorerParams& params,
                                 std::span<const PlanTree> plans) {
  if (plans.size() < 2) {
    throw Error(ErrorCode::kTooFewPlans, "spectrum needs at least 2 unique plans");
  }
  std::vector<EncodedTree> trees;
  trees.reserve(plans.size());
  for (const PlanTree& p : plans) trees.push_back(Encode(Binarize(p), params.scaler));
  return SpectrumFromEmbeddings(EmbedBatch(params, Pointers(trees)));
}

}  // namespace hintrank
