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

// Where (plan, latency) observations come from: a live PostgreSQL session
// steered by planner knobs, or a replay of a previously recorded dataset.
// Collect() drives either one over queries x hint sets.

#ifndef HINTRANK_GATEWAY_H_
#define HINTRANK_GATEWAY_H_

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hintrank/datastore.h"
#include "hintrank/hint_catalog.h"

namespace hintrank {

struct QuerySpec {
  std::string query_id;
  std::string template_id;
  std::string sql;
};

// One {"query_id", "template_id", "sql"} object per line.
std::vector<QuerySpec> LoadQueries(const std::filesystem::path& path);

struct Measurement {
  double latency_ms = 0.0;
  bool timed_out = false;
};

class PlanSource {
 public:
  virtual ~PlanSource() = default;
  // Raw EXPLAIN (FORMAT JSON) text of the plan chosen under `hint_set`.
  virtual std::string PlanFor(const QuerySpec& query, const HintSet& hint_set) = 0;
  virtual Measurement Measure(const QuerySpec& query, const HintSet& hint_set) = 0;
};

// Serves recorded plans and latencies. The first record for a
// (query_id, hint_set_id) pair wins.
class ReplaySource : public PlanSource {
 public:
  explicit ReplaySource(std::span<const ExecutionRecord> records);
  static std::unique_ptr<ReplaySource> FromFile(const std::filesystem::path& path);

  std::string PlanFor(const QuerySpec& query, const HintSet& hint_set) override;
  Measurement Measure(const QuerySpec& query, const HintSet& hint_set) override;

  // Queries in first-appearance order, as recorded.
  std::vector<QuerySpec> Queries() const;

 private:
  const ExecutionRecord& Find(const QuerySpec& query, const HintSet& hint_set) const;

  std::vector<ExecutionRecord> records_;
  std::map<std::pair<std::string, int>, std::size_t> index_;
};

struct DbConfig {
  std::string host = "localhost";
  int port = 5432;
  std::string database = "postgres";
  std::string user = "postgres";
  // Name of the environment variable holding the password; the value is
  // read at connect time and never logged.
  std::string password_env = "HINTRANK_DB_PASSWORD";
  int timeout_ms = 300000;
  int repetitions = 1;
  std::string reset_statement = "RESET ALL";

  // Throws InvalidConfig.
  void Validate() const;
};

// Median of the samples; the mean of the two middle values for even counts.
double MedianLatency(std::vector<double> samples_ms);

// Live client over libpq, loaded at runtime so the library builds without
// PostgreSQL headers. Construction connects; failures raise ConnectionError.
class PostgresSource : public PlanSource {
 public:
  explicit PostgresSource(const DbConfig& config);
  ~PostgresSource() override;
  PostgresSource(const PostgresSource&) = delete;
  PostgresSource& operator=(const PostgresSource&) = delete;

  std::string PlanFor(const QuerySpec& query, const HintSet& hint_set) override;
  Measurement Measure(const QuerySpec& query, const HintSet& hint_set) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct CollectSummary {
  int written = 0;
  int skipped = 0;  // already present in the output file
  int failed = 0;   // listed in the failure manifest
};

using Clock = std::function<std::string()>;
// Current UTC time as ISO-8601 with a trailing 'Z'.
std::string UtcTimestamp();

// For every query x hint set not already in `out`, fetches the plan, measures
// it and appends one record. Serial. A failing item is written to `manifest`
// (one JSON object per line) and collection continues.
CollectSummary Collect(std::span<const QuerySpec> queries, const Catalog& catalog,
                       PlanSource& source, const std::filesystem::path& out,
                       const std::filesystem::path& manifest,
                       const Clock& clock = UtcTimestamp);

}  // namespace hintrank

#endif  // HINTRANK_GATEWAY_H_
