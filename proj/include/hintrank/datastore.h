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

// Execution records on disk (one JSON object per line), their grouping into
// per-query candidate lists, and the train/test splits used for evaluation.

#ifndef HINTRANK_DATASTORE_H_
#define HINTRANK_DATASTORE_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hintrank/hint_catalog.h"
#include "hintrank/plan_ir.h"

namespace hintrank {

struct ExecutionRecord {
  std::string query_id;
  std::string template_id;
  std::string sql;
  int hint_set_id = 0;
  std::string plan_json;
  double latency_ms = 0.0;
  bool timed_out = false;
  std::string collected_at;  // ISO-8601 UTC

  friend bool operator==(const ExecutionRecord&, const ExecutionRecord&) = default;
};

std::string RecordToJsonLine(const ExecutionRecord& record);
// Throws SchemaViolation naming `line_number` (1-based).
ExecutionRecord RecordFromJsonLine(std::string_view line, int line_number);

void AppendRecord(const std::filesystem::path& path, const ExecutionRecord& record);
// Missing file is an IoError; an empty file yields no records. Blank lines
// are skipped.
std::vector<ExecutionRecord> LoadRecords(const std::filesystem::path& path);
void WriteRecords(const std::filesystem::path& path,
                  std::span<const ExecutionRecord> records);

struct CandidatePlan {
  std::string fingerprint;
  PlanTree plan;
  double latency_ms = 0.0;        // mean over deduplicated records
  std::vector<int> hint_set_ids;  // ascending; front() is the lowest id

  friend bool operator==(const CandidatePlan&, const CandidatePlan&) = default;
};

struct QueryEntry {
  std::string query_id;
  std::string template_id;
  std::string sql;
  std::vector<CandidatePlan> candidates;  // ordered by lowest hint set id
  // Latency of the candidate that hint set 0 produced.
  double default_latency = 0.0;
  int default_candidate = 0;

  friend bool operator==(const QueryEntry&, const QueryEntry&) = default;
};

// Groups records by query (first-appearance order), parses and fingerprints
// each plan and deduplicates per query. Throws MissingDefaultPlan,
// InvalidHintSet for ids outside the catalog, and plan parse errors prefixed
// with the query id.
std::vector<QueryEntry> GroupQueries(std::span<const ExecutionRecord> records,
                                     const Catalog& catalog);

enum class Scenario { kAdhoc, kRepeat };
enum class Selection { kRand, kSlow };

std::string_view ScenarioName(Scenario s);
std::string_view SelectionName(Selection s);
Scenario ParseScenario(std::string_view name);
Selection ParseSelection(std::string_view name);

struct ScenarioSpec {
  Scenario scenario = Scenario::kAdhoc;
  Selection selection = Selection::kRand;
  // Templates held out (adhoc) or queries held out per template (repeat).
  int holdout = 1;
  std::uint64_t seed = 0;
};

struct SplitResult {
  ScenarioSpec spec;
  std::vector<std::string> train;
  std::vector<std::string> test;
};

// adhoc-rand: `holdout` templates chosen uniformly, all their queries test.
// adhoc-slow: the `holdout` templates with the largest total default latency.
// repeat-rand: per template, `holdout` queries chosen uniformly.
// repeat-slow: per template, the `holdout` queries with largest default latency.
// Ids are listed in entry order on both sides.
SplitResult MakeSplit(std::span<const QueryEntry> entries, const ScenarioSpec& spec);

std::string SplitToJson(const SplitResult& split);
SplitResult SplitFromJson(std::string_view json_text);

// Entries whose query id is in `ids`, in entry order.
std::vector<QueryEntry> SelectQueries(std::span<const QueryEntry> entries,
                                      std::span<const std::string> ids);

// Prepends `prefix` to every query and template id so datasets can be merged.
std::vector<QueryEntry> PrefixDataset(std::vector<QueryEntry> entries,
                                      std::string_view prefix);

// Concatenation; throws DuplicateQueryId on a shared query id.
std::vector<QueryEntry> MergeDatasets(std::span<const QueryEntry> a,
                                      std::span<const QueryEntry> b);

}  // namespace hintrank

#endif  // HINTRANK_DATASTORE_H_
