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

#include "hintrank/synth.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "hintrank/digest.h"
#include "hintrank/io.h"
#include "hintrank/status.h"
#include "json.hpp"

namespace hintrank {
namespace {

using nlohmann::ordered_json;

// A planned subtree: what the planner believed, what execution costs, and
// the EXPLAIN node.
struct Planned {
  double rows = 0.0;
  double believed = 0.0;  // cumulative planner cost
  double actual = 0.0;    // cumulative execution time, ms
  ordered_json node;
};

double LogUniform(SeededRng& rng, double lo_exp, double hi_exp) {
  return std::pow(10.0, lo_exp + (hi_exp - lo_exp) * rng.Uniform());
}

double Log2p(double x) { return std::log2(x + 2.0); }

Planned PlanScan(const SimulatedSource::Relation& rel, const HintSet& h) {
  const double n = rel.base_rows;
  const double out = std::max(1.0, std::round(n * rel.selectivity));
  struct Option {
    const char* type;
    double believed;
    double actual;
  };
  std::vector<Option> options;
  if (h.flags[kEnableSeqScan]) options.push_back({"Seq Scan", 0.01 * n, 2e-5 * n + 0.05});
  if (h.flags[kEnableIndexScan]) {
    options.push_back({"Index Scan", 0.04 * out + 4.0, 4e-3 * out + 0.05});
  }
  if (h.flags[kEnableIndexOnlyScan] && rel.covering_index) {
    options.push_back({"Index Only Scan", 0.01 * out + 4.0, 1e-3 * out + 0.05});
  }
  // With every usable scan disabled the planner still has to read the table.
  if (options.empty()) options.push_back({"Seq Scan", 0.01 * n, 2e-5 * n + 0.05});
  const Option& best = *std::min_element(
      options.begin(), options.end(),
      [](const Option& a, const Option& b) { return a.believed < b.believed; });

  Planned p;
  p.rows = out;
  p.believed = best.believed;
  p.actual = best.actual;
  p.node["Node Type"] = best.type;
  p.node["Relation Name"] = rel.name;
  if (std::string(best.type) != "Seq Scan") p.node["Index Name"] = rel.name + "_pkey";
  p.node["Total Cost"] = std::round(p.believed * 100.0) / 100.0;
  p.node["Plan Rows"] = out;
  return p;
}

Planned PlanJoin(Planned left, Planned right, double factor, const HintSet& h) {
  const double l = left.rows;
  const double r = right.rows;
  const double out = std::max(1.0, std::round(std::max(l, r) * factor));
  struct Option {
    const char* type;
    double believed;
    double actual;
  };
  std::vector<Option> options;
  if (h.flags[kEnableHashJoin]) {
    options.push_back({"Hash Join", 0.02 * (l + r) + 0.01 * out,
                       1e-4 * l + 4e-4 * r + 2e-5 * out});
  }
  if (h.flags[kEnableMergeJoin]) {
    options.push_back({"Merge Join", 0.015 * (l * Log2p(l) + r * Log2p(r)) + 0.01 * out,
                       6e-5 * (l * Log2p(l) + r * Log2p(r)) + 2e-5 * out});
  }
  if (h.flags[kEnableNestLoop]) {
    options.push_back({"Nested Loop", 2e-5 * l * r + 0.01 * out, 2e-6 * l * r + 2e-5 * out});
  }
  const Option& best = *std::min_element(
      options.begin(), options.end(),
      [](const Option& a, const Option& b) { return a.believed < b.believed; });

  Planned p;
  p.rows = out;
  p.believed = left.believed + right.believed + best.believed;
  p.actual = left.actual + right.actual + best.actual;
  p.node["Node Type"] = best.type;
  p.node["Total Cost"] = std::round(p.believed * 100.0) / 100.0;
  p.node["Plan Rows"] = out;
  p.node["Plans"] = ordered_json::array({std::move(left.node), std::move(right.node)});
  return p;
}

Planned PlanQuery(const SimulatedSource::QueryShape& shape, const HintSet& h) {
  Planned acc = PlanScan(shape.relations[0], h);
  for (std::size_t i = 1; i < shape.relations.size(); ++i) {
    acc = PlanJoin(std::move(acc), PlanScan(shape.relations[i], h), shape.join_factors[i - 1],
                   h);
  }
  return acc;
}

std::uint64_t SeedFrom(std::string_view text) {
  const Sha256 d = Sha256Digest(text);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | d[i];
  return v;
}

std::string Numbered(const char* prefix, int value, int width) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%0*d", prefix, width, value);
  return buf;
}

HintSet Flags(int id, bool hash, bool merge, bool nest, bool index, bool seq, bool index_only) {
  return HintSet{id, {hash, merge, nest, index, seq, index_only}};
}

}  // namespace

Catalog SyntheticCatalog() {
  return Catalog({
      Flags(0, true, true, true, true, true, true),
      Flags(1, true, true, false, true, true, true),     // no nested loop
      Flags(2, false, true, true, true, true, true),     // no hash join
      Flags(3, true, false, true, true, true, true),     // no merge join
      Flags(4, false, false, true, true, true, true),    // nested loop only
      Flags(5, true, true, true, true, false, true),     // no seq scan
      Flags(6, true, true, true, false, true, false),    // seq scan only
      Flags(7, true, true, false, true, false, true),    // no nested loop, no seq scan
  });
}

SimulatedSource::SimulatedSource(const SynthOptions& options) : options_(options) {
  if (options.num_templates < 1 || options.queries_per_template < 1) {
    throw Error(ErrorCode::kInvalidConfig, "synthetic workload needs templates and queries");
  }
  if (!(options.noise >= 0.0) || options.noise > 0.05) {
    throw Error(ErrorCode::kInvalidConfig, "synthetic noise must be in [0, 0.05]");
  }
  SeededRng rng(options.seed);
  for (int t = 1; t <= options.num_templates; ++t) {
    const std::string template_id = Numbered("T", t, 2);
    const int k = 2 + static_cast<int>(rng.Below(3));
    std::vector<Relation> base;
    for (int j = 0; j < k; ++j) {
      Relation rel;
      rel.name = "t" + std::to_string(t) + "_r" + std::to_string(j + 1);
      rel.base_rows = std::round(LogUniform(rng, 3.0, 6.5));
      rel.covering_index = rng.Uniform() < 0.5;
      base.push_back(rel);
    }
    for (int q = 1; q <= options.queries_per_template; ++q) {
      QueryShape shape;
      shape.relations = base;
      for (Relation& rel : shape.relations) rel.selectivity = LogUniform(rng, -4.0, 0.0);
      for (int j = 1; j < k; ++j) shape.join_factors.push_back(LogUniform(rng, -1.5, 0.5));
      QuerySpec spec;
      spec.query_id = template_id + "-" + Numbered("q", q, 3);
      spec.template_id = template_id;
      spec.sql = "SELECT count(*) FROM";
      for (int j = 0; j < k; ++j) {
        spec.sql += (j ? ", " : " ") + shape.relations[j].name;
      }
      char filter[64];
      std::snprintf(filter, sizeof(filter), " /* %s */", spec.query_id.c_str());
      spec.sql += filter;
      shapes_.emplace(spec.query_id, std::move(shape));
      queries_.push_back(std::move(spec));
    }
  }
}

const SimulatedSource::QueryShape& SimulatedSource::ShapeOf(const QuerySpec& query) const {
  auto it = shapes_.find(query.query_id);
  if (it == shapes_.end()) {
    throw Error(ErrorCode::kSqlError, "unknown synthetic query " + query.query_id);
  }
  return it->second;
}

std::string SimulatedSource::PlanFor(const QuerySpec& query, const HintSet& hint_set) {
  ordered_json doc = ordered_json::array();
  doc.push_back(ordered_json{{"Plan", PlanQuery(ShapeOf(query), hint_set).node}});
  return doc.dump();
}

double SimulatedSource::NoiselessLatency(const QuerySpec& query,
                                         const HintSet& hint_set) const {
  return PlanQuery(ShapeOf(query), hint_set).actual;
}

Measurement SimulatedSource::Measure(const QuerySpec& query, const HintSet& hint_set) {
  const double clean = NoiselessLatency(query, hint_set);
  SeededRng rng(SeedFrom(std::to_string(options_.seed) + "/" + query.query_id + "/" +
                         std::to_string(hint_set.id)));
  const double jitter = std::exp(options_.noise * (2.0 * rng.Uniform() - 1.0));
  return Measurement{clean * jitter, false};
}

}  // namespace hintrank
