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

// A simulated planner and executor for tests and demos. Each template is a
// left-deep join over 2-4 relations; queries vary the filter selectivities.
// The planner picks operators among those a hint set leaves enabled using a
// deliberately miscalibrated cost model, while the "executor" charges a
// different, deterministic cost plus bounded multiplicative noise.

#ifndef HINTRANK_SYNTH_H_
#define HINTRANK_SYNTH_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hintrank/gateway.h"
#include "hintrank/hint_catalog.h"

namespace hintrank {

struct SynthOptions {
  int num_templates = 10;
  int queries_per_template = 25;
  std::uint64_t seed = 7;
  // Half-width of the log-uniform latency noise; 0.03 keeps every
  // measurement within about 3% of the noiseless value.
  double noise = 0.03;
};

// Eight hint sets: all-on, then single and paired operator exclusions.
Catalog SyntheticCatalog();

class SimulatedSource : public PlanSource {
 public:
  explicit SimulatedSource(const SynthOptions& options);

  std::vector<QuerySpec> Queries() const { return queries_; }

  std::string PlanFor(const QuerySpec& query, const HintSet& hint_set) override;
  Measurement Measure(const QuerySpec& query, const HintSet& hint_set) override;

  // Latency without noise, for tests.
  double NoiselessLatency(const QuerySpec& query, const HintSet& hint_set) const;

  struct Relation {
    std::string name;
    double base_rows = 0.0;
    double selectivity = 1.0;
    bool covering_index = false;
  };
  struct QueryShape {
    std::vector<Relation> relations;  // join order, left-deep
    std::vector<double> join_factors;  // one per join
  };

 private:
  const QueryShape& ShapeOf(const QuerySpec& query) const;

  SynthOptions options_;
  std::vector<QuerySpec> queries_;
  std::map<std::string, QueryShape> shapes_;
};

}  // namespace hintrank

#endif  // HINTRANK_SYNTH_H_
