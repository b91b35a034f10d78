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

#include "hintrank/gateway.h"

#include <dlfcn.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <set>
#include <sstream>

#include "hintrank/io.h"
#include "hintrank/status.h"
#include "json.hpp"

namespace hintrank {
namespace {

using nlohmann::json;

std::string QuoteConnValue(const std::string& v) {
  std::string out = "'";
  for (char c : v) {
    if (c == '\'' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out + "'";
}

}  // namespace

std::vector<QuerySpec> LoadQueries(const std::filesystem::path& path) {
  std::istringstream in(ReadFile(path));
  std::vector<QuerySpec> queries;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      throw Error(ErrorCode::kSchemaViolation,
                  "query line " + std::to_string(number) + ": not valid JSON");
    }
    try {
      queries.push_back(QuerySpec{j.at("query_id").get<std::string>(),
                                  j.at("template_id").get<std::string>(),
                                  j.at("sql").get<std::string>()});
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kSchemaViolation,
                  "query line " + std::to_string(number) + ": " + e.what());
    }
  }
  return queries;
}

ReplaySource::ReplaySource(std::span<const ExecutionRecord> records)
    : records_(records.begin(), records.end()) {
  for (std::size_t i = 0; i < records_.size(); ++i) {
    index_.try_emplace({records_[i].query_id, records_[i].hint_set_id}, i);
  }
}

std::unique_ptr<ReplaySource> ReplaySource::FromFile(const std::filesystem::path& path) {
  const std::vector<ExecutionRecord> records = LoadRecords(path);
  return std::make_unique<ReplaySource>(records);
}

const ExecutionRecord& ReplaySource::Find(const QuerySpec& query,
                                          const HintSet& hint_set) const {
  auto it = index_.find({query.query_id, hint_set.id});
  if (it == index_.end()) {
    throw Error(ErrorCode::kMissingRecord,
                "no recorded execution of query " + query.query_id +
                    " under hint set " + std::to_string(hint_set.id));
  }
  return records_[it->second];
}

std::string ReplaySource::PlanFor(const QuerySpec& query, const HintSet& hint_set) {
  return Find(query, hint_set).plan_json;
}

Measurement ReplaySource::Measure(const QuerySpec& query, const HintSet& hint_set) {
  const ExecutionRecord& r = Find(query, hint_set);
  return Measurement{r.latency_ms, r.timed_out};
}

std::vector<QuerySpec> ReplaySource::Queries() const {
  std::vector<QuerySpec> out;
  std::set<std::string> seen;
  for (const ExecutionRecord& r : records_) {
    if (seen.insert(r.query_id).second) {
      out.push_back(QuerySpec{r.query_id, r.template_id, r.sql});
    }
  }
  return out;
}

void DbConfig::Validate() const {
  if (timeout_ms <= 0) throw Error(ErrorCode::kInvalidConfig, "timeout_ms must be > 0");
  if (repetitions < 1) throw Error(ErrorCode::kInvalidConfig, "repetitions must be >= 1");
  if (port <= 0 || port > 65535) throw Error(ErrorCode::kInvalidConfig, "bad port");
}

double MedianLatency(std::vector<double> samples_ms) {
  if (samples_ms.empty()) {
    throw Error(ErrorCode::kMissingLatency, "median of no measurements");
  }
  std::sort(samples_ms.begin(), samples_ms.end());
  const std::size_t n = samples_ms.size();
  return n % 2 == 1 ? samples_ms[n / 2]
                    : 0.5 * (samples_ms[n / 2 - 1] + samples_ms[n / 2]);
}

// libpq entry points resolved with dlsym. Only the stable C ABI is used:
// opaque connection/result pointers and integer status enums.
struct PostgresSource::Impl {
  using Conn = void;
  using Result = void;
  static constexpr int kConnectionOk = 0;
  static constexpr int kCommandOk = 1;
  static constexpr int kTuplesOk = 2;
  static constexpr int kDiagSqlState = 'C';

  void* lib = nullptr;
  Conn* conn = nullptr;
  DbConfig config;

  Conn* (*connectdb)(const char*) = nullptr;
  int (*status)(const Conn*) = nullptr;
  char* (*error_message)(const Conn*) = nullptr;
  Result* (*exec)(Conn*, const char*) = nullptr;
  int (*result_status)(const Result*) = nullptr;
  char* (*result_error_message)(const Result*) = nullptr;
  char* (*result_error_field)(const Result*, int) = nullptr;
  int (*ntuples)(const Result*) = nullptr;
  char* (*getvalue)(const Result*, int, int) = nullptr;
  void (*clear)(Result*) = nullptr;
  void (*finish)(Conn*) = nullptr;

  template <typename F>
  void Bind(F* fn, const char* name) {
    *fn = reinterpret_cast<F>(dlsym(lib, name));
    if (*fn == nullptr) {
      throw Error(ErrorCode::kConnectionError,
                  std::string("libpq is missing symbol ") + name);
    }
  }

  struct Outcome {
    bool ok = false;
    std::string sqlstate;
    std::string message;
    std::string first_value;
  };

  Outcome Run(const std::string& sql) {
    Result* res = exec(conn, sql.c_str());
    Outcome o;
    if (res == nullptr) {
      o.message = error_message(conn);
      return o;
    }
    const int st = result_status(res);
    o.ok = st == kCommandOk || st == kTuplesOk;
    if (!o.ok) {
      o.message = result_error_message(res);
      if (const char* state = result_error_field(res, kDiagSqlState)) o.sqlstate = state;
    } else if (st == kTuplesOk && ntuples(res) > 0) {
      o.first_value = getvalue(res, 0, 0);
    }
    clear(res);
    return o;
  }

  void MustRun(const std::string& sql) {
    Outcome o = Run(sql);
    if (!o.ok) throw Error(ErrorCode::kSqlError, o.message);
  }

  void Apply(const HintSet& hint_set) {
    for (const std::string& s : ToSetStatements(hint_set)) MustRun(s);
  }

  void Reset() { Run(config.reset_statement); }
};

PostgresSource::PostgresSource(const DbConfig& config) : impl_(std::make_unique<Impl>()) {
  config.Validate();
  impl_->config = config;
  impl_->lib = dlopen("libpq.so.5", RTLD_NOW | RTLD_LOCAL);
  if (impl_->lib == nullptr) {
    throw Error(ErrorCode::kConnectionError,
                std::string("cannot load libpq.so.5: ") + dlerror());
  }
  Impl& p = *impl_;
  p.Bind(&p.connectdb, "PQconnectdb");
  p.Bind(&p.status, "PQstatus");
  p.Bind(&p.error_message, "PQerrorMessage");
  p.Bind(&p.exec, "PQexec");
  p.Bind(&p.result_status, "PQresultStatus");
  p.Bind(&p.result_error_message, "PQresultErrorMessage");
  p.Bind(&p.result_error_field, "PQresultErrorField");
  p.Bind(&p.ntuples, "PQntuples");
  p.Bind(&p.getvalue, "PQgetvalue");
  p.Bind(&p.clear, "PQclear");
  p.Bind(&p.finish, "PQfinish");

  std::string conninfo = "host=" + QuoteConnValue(config.host) +
                         " port=" + std::to_string(config.port) +
                         " dbname=" + QuoteConnValue(config.database) +
                         " user=" + QuoteConnValue(config.user) + " connect_timeout=10";
  if (const char* secret = std::getenv(config.password_env.c_str())) {
    conninfo += " password=" + QuoteConnValue(secret);
  }
  p.conn = p.connectdb(conninfo.c_str());
  if (p.conn == nullptr || p.status(p.conn) != Impl::kConnectionOk) {
    const std::string why = p.conn ? p.error_message(p.conn) : "out of memory";
    throw Error(ErrorCode::kConnectionError,
                "cannot connect to " + config.host + ":" + std::to_string(config.port) +
                    "/" + config.database + ": " + why);
  }
}

PostgresSource::~PostgresSource() {
  if (impl_ && impl_->conn) impl_->finish(impl_->conn);
  if (impl_ && impl_->lib) dlclose(impl_->lib);
}

std::string PostgresSource::PlanFor(const QuerySpec& query, const HintSet& hint_set) {
  Impl& p = *impl_;
  p.Apply(hint_set);
  Impl::Outcome o = p.Run("EXPLAIN (FORMAT JSON) " + query.sql);
  p.Reset();
  if (!o.ok) throw Error(ErrorCode::kSqlError, o.message);
  return o.first_value;
}

Measurement PostgresSource::Measure(const QuerySpec& query, const HintSet& hint_set) {
  Impl& p = *impl_;
  p.Apply(hint_set);
  p.MustRun("SET statement_timeout = " + std::to_string(p.config.timeout_ms));
  std::vector<double> samples;
  for (int i = 0; i < p.config.repetitions; ++i) {
    const auto start = std::chrono::steady_clock::now();
    Impl::Outcome o = p.Run(query.sql);
    const auto stop = std::chrono::steady_clock::now();
    if (!o.ok) {
      p.Reset();
      // 57014: query_canceled, raised when statement_timeout fires.
      if (o.sqlstate == "57014") {
        return Measurement{static_cast<double>(p.config.timeout_ms), true};
      }
      throw Error(ErrorCode::kSqlError, o.message);
    }
    samples.push_back(std::chrono::duration<double, std::milli>(stop - start).count());
  }
  p.Reset();
  return Measurement{MedianLatency(std::move(samples)), false};
}

std::string UtcTimestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

CollectSummary Collect(std::span<const QuerySpec> queries, const Catalog& catalog,
                       PlanSource& source, const std::filesystem::path& out,
                       const std::filesystem::path& manifest, const Clock& clock) {
  std::set<std::pair<std::string, int>> done;
  if (std::filesystem::exists(out)) {
    for (const ExecutionRecord& r : LoadRecords(out)) done.insert({r.query_id, r.hint_set_id});
  }
  CollectSummary summary;
  for (const QuerySpec& q : queries) {
    for (const HintSet& h : catalog.entries()) {
      if (done.count({q.query_id, h.id})) {
        ++summary.skipped;
        continue;
      }
      try {
        ExecutionRecord r;
        r.query_id = q.query_id;
        r.template_id = q.template_id;
        r.sql = q.sql;
        r.hint_set_id = h.id;
        r.plan_json = source.PlanFor(q, h);
        const Measurement m = source.Measure(q, h);
        r.latency_ms = m.latency_ms;
        r.timed_out = m.timed_out;
        r.collected_at = clock();
        AppendRecord(out, r);
        ++summary.written;
      } catch (const Error& e) {
        if (e.code() == ErrorCode::kIoError) throw;
        nlohmann::ordered_json entry;
        entry["query_id"] = q.query_id;
        entry["hint_set_id"] = h.id;
        entry["error"] = ErrorCodeName(e.code());
        entry["message"] = e.what();
        AppendLine(manifest, entry.dump());
        ++summary.failed;
      }
    }
  }
  return summary;
}

}  // namespace hintrank
