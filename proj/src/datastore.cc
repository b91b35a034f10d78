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

#include "hintrank/datastore.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "hintrank/io.h"
#include "hintrank/ltr.h"
#include "hintrank/status.h"
#include "json.hpp"

namespace hintrank {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void Violation(int line, const std::string& what) {
  throw Error(ErrorCode::kSchemaViolation,
              "record line " + std::to_string(line) + ": " + what);
}

const json& Field(const json& obj, const char* key, int line) {
  auto it = obj.find(key);
  if (it == obj.end()) Violation(line, std::string("missing \"") + key + "\"");
  return *it;
}

std::string StringField(const json& obj, const char* key, int line) {
  const json& v = Field(obj, key, line);
  if (!v.is_string()) Violation(line, std::string("\"") + key + "\" must be a string");
  return v.get<std::string>();
}

}  // namespace

std::string RecordToJsonLine(const ExecutionRecord& r) {
  ordered_json j;
  j["query_id"] = r.query_id;
  j["template_id"] = r.template_id;
  j["sql"] = r.sql;
  j["hint_set_id"] = r.hint_set_id;
  j["plan_json"] = r.plan_json;
  j["latency_ms"] = r.latency_ms;
  j["timed_out"] = r.timed_out;
  j["collected_at"] = r.collected_at;
  return j.dump();
}

ExecutionRecord RecordFromJsonLine(std::string_view line, int line_number) {
  const json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) Violation(line_number, "not a JSON object");
  ExecutionRecord r;
  r.query_id = StringField(j, "query_id", line_number);
  r.template_id = StringField(j, "template_id", line_number);
  r.sql = StringField(j, "sql", line_number);
  const json& hint = Field(j, "hint_set_id", line_number);
  if (!hint.is_number_integer()) Violation(line_number, "\"hint_set_id\" must be an integer");
  r.hint_set_id = hint.get<int>();
  r.plan_json = StringField(j, "plan_json", line_number);
  const json& latency = Field(j, "latency_ms", line_number);
  if (!latency.is_number()) Violation(line_number, "\"latency_ms\" must be a number");
  r.latency_ms = latency.get<double>();
  if (!(r.latency_ms > 0.0) || !std::isfinite(r.latency_ms)) {
    Violation(line_number, "\"latency_ms\" must be positive");
  }
  const json& timed_out = Field(j, "timed_out", line_number);
  if (!timed_out.is_boolean()) Violation(line_number, "\"timed_out\" must be a boolean");
  r.timed_out = timed_out.get<bool>();
  r.collected_at = StringField(j, "collected_at", line_number);
  if (r.query_id.empty()) Violation(line_number, "\"query_id\" is empty");
  return r;
}

void AppendRecord(const std::filesystem::path& path, const ExecutionRecord& record) {
  AppendLine(path, RecordToJsonLine(record));
}

std::vector<ExecutionRecord> LoadRecords(const std::filesystem::path& path) {
  std::istringstream in(ReadFile(path));
  std::vector<ExecutionRecord> records;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    records.push_back(RecordFromJsonLine(line, number));
  }
  return records;
}

void WriteRecords(const std::filesystem::path& path,
                  std::span<const ExecutionRecord> records) {
  std::string out;
  for (const ExecutionRecord& r : records) {
    out += RecordToJsonLine(r);
    out += '\n';
  }
  WriteFile(path, out);
}

std::vector<QueryEntry> GroupQueries(std::span<const ExecutionRecord> records,
                                     const Catalog& catalog) {
  std::vector<std::string> order;
  std::unordered_map<std::string, std::vector<const ExecutionRecord*>> by_query;
  for (const ExecutionRecord& r : records) {
    if (!catalog.contains(r.hint_set_id)) {
      throw Error(ErrorCode::kInvalidHintSet,
                  "query " + r.query_id + ": hint set id " +
                      std::to_string(r.hint_set_id) + " is not in the catalog");
    }
    auto [it, inserted] = by_query.try_emplace(r.query_id);
    if (inserted) order.push_back(r.query_id);
    it->second.push_back(&r);
  }

  std::vector<QueryEntry> entries;
  entries.reserve(order.size());
  for (const std::string& qid : order) {
    std::vector<const ExecutionRecord*>& group = by_query[qid];
    std::stable_sort(group.begin(), group.end(),
                     [](const ExecutionRecord* a, const ExecutionRecord* b) {
                       return a->hint_set_id < b->hint_set_id;
                     });
    if (group.front()->hint_set_id != 0) {
      throw Error(ErrorCode::kMissingDefaultPlan,
                  "query " + qid + " has no record for hint set 0");
    }
    std::vector<PlanTree> plans;
    std::vector<ltr::PlanObservation> observations;
    for (const ExecutionRecord* r : group) {
      try {
        plans.push_back(ParseExplain(r->plan_json));
      } catch (const Error& e) {
        throw Error(e.code(), "query " + qid + ", hint set " +
                                  std::to_string(r->hint_set_id) + ": " + e.what());
      }
      observations.push_back(
          ltr::PlanObservation{Fingerprint(plans.back()), r->latency_ms, r->hint_set_id});
    }
    QueryEntry entry;
    entry.query_id = qid;
    entry.template_id = group.front()->template_id;
    entry.sql = group.front()->sql;
    for (ltr::UniquePlan& u : ltr::DedupPlans(observations)) {
      entry.candidates.push_back(CandidatePlan{std::move(u.fingerprint),
                                               std::move(plans[u.first_index]),
                                               u.latency, std::move(u.hint_set_ids)});
    }
    // Hint set 0 sorts first, so its plan is the first candidate.
    entry.default_candidate = 0;
    entry.default_latency = entry.candidates.front().latency_ms;
    entries.push_back(std::move(entry));
  }
  return entries;
}

std::string_view ScenarioName(Scenario s) {
  return s == Scenario::kAdhoc ? "adhoc" : "repeat";
}

std::string_view SelectionName(Selection s) {
  return s == Selection::kRand ? "rand" : "slow";
}

Scenario ParseScenario(std::string_view name) {
  if (name == "adhoc") return Scenario::kAdhoc;
  if (name == "repeat") return Scenario::kRepeat;
  throw Error(ErrorCode::kInvalidConfig,
              "scenario must be adhoc or repeat, got \"" + std::string(name) + "\"");
}

Selection ParseSelection(std::string_view name) {
  if (name == "rand") return Selection::kRand;
  if (name == "slow") return Selection::kSlow;
  throw Error(ErrorCode::kInvalidConfig,
              "selection must be rand or slow, got \"" + std::string(name) + "\"");
}

SplitResult MakeSplit(std::span<const QueryEntry> entries, const ScenarioSpec& spec) {
  if (spec.holdout < 1) throw Error(ErrorCode::kInvalidConfig, "holdout must be >= 1");
  // Templates in sorted order, each with its queries in entry order.
  std::map<std::string, std::vector<const QueryEntry*>> templates;
  for (const QueryEntry& e : entries) templates[e.template_id].push_back(&e);

  std::unordered_set<std::string> test_ids;
  SeededRng rng(spec.seed);
  if (spec.scenario == Scenario::kAdhoc) {
    if (spec.holdout >= static_cast<int>(templates.size())) {
      throw Error(ErrorCode::kInsufficientTemplates,
                  "adhoc holdout of " + std::to_string(spec.holdout) +
                      " templates leaves none for training (" +
                      std::to_string(templates.size()) + " templates)");
    }
    std::vector<std::string> names;
    for (const auto& [name, _] : templates) names.push_back(name);
    if (spec.selection == Selection::kRand) {
      rng.Shuffle(names.begin(), names.end());
    } else {
      std::map<std::string, double> total;
      for (const auto& [name, qs] : templates) {
        for (const QueryEntry* q : qs) total[name] += q->default_latency;
      }
      std::stable_sort(names.begin(), names.end(),
                       [&](const std::string& a, const std::string& b) {
                         return total[a] > total[b];
                       });
    }
    for (int i = 0; i < spec.holdout; ++i) {
      for (const QueryEntry* q : templates[names[i]]) test_ids.insert(q->query_id);
    }
  } else {
    for (const auto& [name, qs] : templates) {
      if (spec.holdout >= static_cast<int>(qs.size())) {
        throw Error(ErrorCode::kInsufficientQueriesPerTemplate,
                    "template " + name + " has " + std::to_string(qs.size()) +
                        " queries; repeat holdout " + std::to_string(spec.holdout) +
                        " needs more");
      }
    }
    for (const auto& [name, qs] : templates) {
      std::vector<const QueryEntry*> pick = qs;
      if (spec.selection == Selection::kRand) {
        rng.Shuffle(pick.begin(), pick.end());
      } else {
        std::stable_sort(pick.begin(), pick.end(),
                         [](const QueryEntry* a, const QueryEntry* b) {
                           if (a->default_latency != b->default_latency) {
                             return a->default_latency > b->default_latency;
                           }
                           return a->query_id < b->query_id;
                         });
      }
      for (int i = 0; i < spec.holdout; ++i) test_ids.insert(pick[i]->query_id);
    }
  }

  SplitResult split;
  split.spec = spec;
  for (const QueryEntry& e : entries) {
    (test_ids.count(e.query_id) ? split.test : split.train).push_back(e.query_id);
  }
  return split;
}

std::string SplitToJson(const SplitResult& split) {
  ordered_json j;
  j["spec"] = ordered_json{{"scenario", ScenarioName(split.spec.scenario)},
                           {"selection", SelectionName(split.spec.selection)},
                           {"holdout", split.spec.holdout},
                           {"seed", split.spec.seed}};
  j["train"] = split.train;
  j["test"] = split.test;
  return j.dump(2) + "\n";
}

SplitResult SplitFromJson(std::string_view json_text) {
  const json j = json::parse(json_text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw Error(ErrorCode::kMalformedDocument, "split file is not a JSON object");
  }
  try {
    SplitResult s;
    const json& spec = j.at("spec");
    s.spec.scenario = ParseScenario(spec.at("scenario").get<std::string>());
    s.spec.selection = ParseSelection(spec.at("selection").get<std::string>());
    s.spec.holdout = spec.at("holdout").get<int>();
    s.spec.seed = spec.at("seed").get<std::uint64_t>();
    s.train = j.at("train").get<std::vector<std::string>>();
    s.test = j.at("test").get<std::vector<std::string>>();
    return s;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedDocument, std::string("split file: ") + e.what());
  }
}

std::vector<QueryEntry> SelectQueries(std::span<const QueryEntry> entries,
                                      std::span<const std::string> ids) {
  const std::unordered_set<std::string> wanted(ids.begin(), ids.end());
  std::vector<QueryEntry> out;
  for (const QueryEntry& e : entries) {
    if (wanted.count(e.query_id)) out.push_back(e);
  }
  return out;
}

std::vector<QueryEntry> PrefixDataset(std::vector<QueryEntry> entries,
                                      std::string_view prefix) {
  for (QueryEntry& e : entries) {
    e.query_id.insert(0, prefix);
    e.template_id.insert(0, prefix);
  }
  return entries;
}

std::vector<QueryEntry> MergeDatasets(std::span<const QueryEntry> a,
                                      std::span<const QueryEntry> b) {
  std::unordered_set<std::string> ids;
  std::vector<QueryEntry> out;
  out.reserve(a.size() + b.size());
  for (auto part : {a, b}) {
    for (const QueryEntry& e : part) {
      if (!ids.insert(e.query_id).second) {
        throw Error(ErrorCode::kDuplicateQueryId,
                    "query id " + e.query_id + " appears in both datasets");
      }
      out.push_back(e);
    }
  }
  return out;
}

}  // namespace hintrank
