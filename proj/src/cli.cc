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

#include "hintrank/cli.h"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <optional>
#include <set>

#include "CLI11.hpp"
#include "hintrank/datastore.h"
#include "hintrank/eval.h"
#include "hintrank/gateway.h"
#include "hintrank/hint_catalog.h"
#include "hintrank/io.h"
#include "hintrank/plan_ir.h"
#include "hintrank/scorer.h"
#include "hintrank/status.h"
#include "hintrank/synth.h"
#include "hintrank/trainer.h"
#include "json.hpp"

namespace hintrank {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string Fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

void RequireFile(const std::string& path, const char* what) {
  if (path.empty()) throw Error(ErrorCode::kUsage, std::string("missing ") + what + " path");
  if (!fs::is_regular_file(path)) {
    throw Error(ErrorCode::kIoError, std::string(what) + " file not found: " + path);
  }
}

Catalog LoadCatalogOrDefault(const std::string& path) {
  if (path.empty()) return DefaultCatalog();
  RequireFile(path, "catalog");
  return ParseCatalog(ReadFile(path));
}

std::vector<QueryEntry> LoadDatasets(const std::vector<std::string>& paths,
                                     const Catalog& catalog) {
  for (const std::string& p : paths) RequireFile(p, "dataset");
  std::vector<QueryEntry> merged;
  for (const std::string& p : paths) {
    const std::vector<ExecutionRecord> records = LoadRecords(p);
    const std::vector<QueryEntry> entries = GroupQueries(records, catalog);
    merged = MergeDatasets(merged, entries);
  }
  return merged;
}

Checkpoint LoadMatchingCheckpoint(const std::string& path, const Catalog& catalog) {
  RequireFile(path, "checkpoint");
  Checkpoint ckpt = LoadCheckpoint(path);
  if (ckpt.params.catalog_hash != catalog.Hash()) {
    throw Error(ErrorCode::kCatalogMismatch,
                "checkpoint was trained against catalog " + ckpt.params.catalog_hash +
                    " but the dataset uses catalog " + catalog.Hash());
  }
  return ckpt;
}

std::string SplitLabel(const ScenarioSpec& spec) {
  return std::string(ScenarioName(spec.scenario)) + "-" +
         std::string(SelectionName(spec.selection));
}

std::string WithSuffix(const std::string& path, const std::string& ext) {
  return fs::path(path).replace_extension(ext).string();
}

struct Options {
  // Shared paths.
  std::vector<std::string> data;
  std::string catalog;
  std::string checkpoint;
  std::string split;
  std::string out;
  std::string report;
  std::string csv;
  std::string config;
  std::string queries;
  std::string replay;
  std::string manifest;
  std::string query_id;
  std::string population = "all";
  // Split.
  std::string scenario = "adhoc";
  std::string selection = "rand";
  int holdout = 1;
  std::optional<std::uint64_t> seed;
  // Train overrides.
  std::string mode;
  std::optional<int> epochs;
  std::optional<double> learning_rate;
  // Database.
  DbConfig db;
  // Synthetic workload.
  SynthOptions synth;
  std::string catalog_out;
};

int DoSynth(const Options& o, std::ostream& out) {
  if (o.out.empty()) throw Error(ErrorCode::kUsage, "synth needs --out");
  SynthOptions opts = o.synth;
  if (o.seed) opts.seed = *o.seed;
  SimulatedSource source(opts);
  const Catalog catalog = SyntheticCatalog();
  if (fs::exists(o.out)) fs::remove(o.out);
  const std::string manifest = o.out + ".failures.jsonl";
  // A fixed clock keeps generated files byte-identical across runs.
  const CollectSummary s = Collect(source.Queries(), catalog, source, o.out, manifest,
                                   [] { return std::string("1970-01-01T00:00:00Z"); });
  const std::string catalog_path = o.catalog_out.empty() ? WithSuffix(o.out, ".catalog.json")
                                                         : o.catalog_out;
  WriteFile(catalog_path, catalog.ToJson());
  out << "wrote " << s.written << " records for " << source.Queries().size()
      << " queries to " << o.out << "\n"
      << "catalog (" << catalog.size() << " hint sets) written to " << catalog_path << "\n";
  return 0;
}

int DoCollect(const Options& o, std::ostream& out) {
  if (o.out.empty()) throw Error(ErrorCode::kUsage, "collect needs --out");
  const Catalog catalog = LoadCatalogOrDefault(o.catalog);
  std::unique_ptr<PlanSource> source;
  std::vector<QuerySpec> queries;
  if (!o.queries.empty()) {
    RequireFile(o.queries, "queries");
    queries = LoadQueries(o.queries);
  }
  if (!o.replay.empty()) {
    RequireFile(o.replay, "replay");
    auto replay = ReplaySource::FromFile(o.replay);
    if (queries.empty()) queries = replay->Queries();
    source = std::move(replay);
  } else {
    if (queries.empty()) throw Error(ErrorCode::kUsage, "collect needs --queries");
    source = std::make_unique<PostgresSource>(o.db);
  }
  const std::string manifest = o.manifest.empty() ? o.out + ".failures.jsonl" : o.manifest;
  const CollectSummary s = Collect(queries, catalog, *source, o.out, manifest);
  out << "written " << s.written << ", skipped " << s.skipped << ", failed " << s.failed
      << "\n";
  if (s.failed > 0) out << "failures listed in " << manifest << "\n";
  return 0;
}

int DoSplit(const Options& o, std::ostream& out) {
  if (o.out.empty()) throw Error(ErrorCode::kUsage, "split needs --out");
  const Catalog catalog = LoadCatalogOrDefault(o.catalog);
  const std::vector<QueryEntry> entries = LoadDatasets(o.data, catalog);
  ScenarioSpec spec;
  spec.scenario = ParseScenario(o.scenario);
  spec.selection = ParseSelection(o.selection);
  spec.holdout = o.holdout;
  spec.seed = o.seed.value_or(0);
  const SplitResult split = MakeSplit(entries, spec);
  WriteFile(o.out, SplitToJson(split));
  out << SplitLabel(spec) << ": " << split.train.size() << " train, " << split.test.size()
      << " test queries\n";
  return 0;
}

std::vector<QueryEntry> Population(const std::vector<QueryEntry>& entries,
                                   const std::string& split_path, const std::string& which,
                                   std::string* label) {
  if (split_path.empty() || which == "all") {
    if (!split_path.empty()) RequireFile(split_path, "split");
    if (label) *label = "all";
    return entries;
  }
  RequireFile(split_path, "split");
  const SplitResult split = SplitFromJson(ReadFile(split_path));
  if (label) *label = SplitLabel(split.spec);
  return SelectQueries(entries, which == "train" ? split.train : split.test);
}

int DoTrain(const Options& o, std::ostream& out) {
  if (o.out.empty()) throw Error(ErrorCode::kUsage, "train needs --out");
  if (!o.config.empty()) RequireFile(o.config, "config");
  TrainConfig config = o.config.empty() ? TrainConfig{} : TrainConfig::FromJson(ReadFile(o.config));
  if (!o.mode.empty()) config.mode = ParseTrainMode(o.mode);
  if (o.seed) config.seed = *o.seed;
  if (o.epochs) config.max_epochs = *o.epochs;
  if (o.learning_rate) config.learning_rate = *o.learning_rate;
  config.Validate();

  const Catalog catalog = LoadCatalogOrDefault(o.catalog);
  const std::vector<QueryEntry> all = LoadDatasets(o.data, catalog);
  const std::vector<QueryEntry> train = Population(all, o.split, "train", nullptr);
  const TrainResult result = Train(train, catalog.Hash(), config);
  SaveCheckpoint(result.checkpoint, o.out);
  const std::string report_path = o.report.empty() ? o.out + ".report.json" : o.report;
  WriteFile(report_path, result.report.ToJson());

  const TrainReport& r = result.report;
  out << TrainModeName(config.mode) << ": " << r.num_train_queries << " train / "
      << r.num_validation_queries << " validation queries, " << r.num_samples
      << " samples\n"
      << "epochs " << r.epochs_run << (r.early_stopped ? " (early stop)" : "")
      << ", best epoch " << r.best_epoch << ", final loss " << Fixed(r.train_loss.back(), 6)
      << ", " << Fixed(r.wall_seconds, 1) << " s\n"
      << "checkpoint " << o.out << ", report " << report_path << "\n";
  return 0;
}

int DoRank(const Options& o, std::ostream& out) {
  if (o.query_id.empty()) throw Error(ErrorCode::kUsage, "rank needs --query-id");
  const Catalog catalog = LoadCatalogOrDefault(o.catalog);
  const Checkpoint ckpt = LoadMatchingCheckpoint(o.checkpoint, catalog);
  const std::vector<QueryEntry> entries = LoadDatasets(o.data, catalog);
  auto it = std::find_if(entries.begin(), entries.end(),
                         [&](const QueryEntry& q) { return q.query_id == o.query_id; });
  if (it == entries.end()) {
    throw Error(ErrorCode::kMissingRecord, "query " + o.query_id + " is not in the dataset");
  }
  std::vector<EncodedTree> trees;
  std::vector<const EncodedTree*> ptrs;
  std::vector<int> ids;
  for (const CandidatePlan& c : it->candidates) {
    trees.push_back(Encode(Binarize(c.plan), ckpt.params.scaler));
    ids.push_back(c.hint_set_ids.front());
  }
  for (const EncodedTree& t : trees) ptrs.push_back(&t);
  const std::vector<double> scores = ScoreBatch(ckpt.params, ptrs);
  const int winner = ArgmaxWithTieBreak(scores, ids);
  std::vector<int> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return ids[a] < ids[b];
  });

  out << "query " << it->query_id << " (template " << it->template_id << "), "
      << it->candidates.size() << " candidate plans\n";
  out << "   rank  score         latency_ms  hint_sets\n";
  int rank = 0;
  for (int i : order) {
    std::string hs;
    for (int id : it->candidates[i].hint_set_ids) hs += (hs.empty() ? "" : ",") + std::to_string(id);
    char line[160];
    std::snprintf(line, sizeof(line), "%s %4d  %12.6f  %10.3f  %s\n", i == winner ? "*" : " ",
                  ++rank, scores[i], it->candidates[i].latency_ms, hs.c_str());
    out << line;
  }
  out << "selected hint set " << ids[winner] << "\n";
  return 0;
}

int DoEvaluate(const Options& o, std::ostream& out) {
  if (o.out.empty()) throw Error(ErrorCode::kUsage, "evaluate needs --out");
  const Catalog catalog = LoadCatalogOrDefault(o.catalog);
  const Checkpoint ckpt = LoadMatchingCheckpoint(o.checkpoint, catalog);
  const std::vector<QueryEntry> entries = LoadDatasets(o.data, catalog);
  std::string label;
  const std::vector<QueryEntry> test = Population(entries, o.split, "test", &label);
  EvalReport report = Evaluate(ckpt.params, test);
  report.label = label;
  WriteFile(o.out, report.ToJson());
  const std::string table = o.report.empty() ? WithSuffix(o.out, ".txt") : o.report;
  WriteFile(table, report.ToTable());
  out << report.ToTable();
  return 0;
}

int DoSpectrum(const Options& o, std::ostream& out) {
  if (o.out.empty()) throw Error(ErrorCode::kUsage, "spectrum needs --out");
  if (o.population != "train" && o.population != "test" && o.population != "all") {
    throw Error(ErrorCode::kUsage, "--population must be train, test or all");
  }
  const Catalog catalog = LoadCatalogOrDefault(o.catalog);
  const Checkpoint ckpt = LoadMatchingCheckpoint(o.checkpoint, catalog);
  const std::vector<QueryEntry> entries = LoadDatasets(o.data, catalog);
  const std::vector<QueryEntry> pop = Population(entries, o.split, o.population, nullptr);
  const std::vector<PlanTree> plans = UniquePlans(pop);
  const SpectrumReport report = EmbeddingSpectrum(ckpt.params, plans);
  WriteFile(o.out, report.ToJson());
  const std::string csv = o.csv.empty() ? WithSuffix(o.out, ".csv") : o.csv;
  WriteFile(csv, report.ToCsv());
  out << report.num_embeddings << " unique plans, " << report.singular_values.size()
      << " dimensions, " << report.collapse_count << " singular values below "
      << report.threshold << "\n"
      << "spectrum written to " << o.out << " and " << csv << "\n";
  return 0;
}

int DoInspect(const Options& o, std::ostream& out) {
  const Catalog catalog = LoadCatalogOrDefault(o.catalog);
  const std::vector<QueryEntry> entries = LoadDatasets(o.data, catalog);
  std::set<std::string> templates;
  std::size_t candidates = 0;
  for (const QueryEntry& q : entries) {
    templates.insert(q.template_id);
    candidates += q.candidates.size();
  }
  const std::vector<PlanTree> plans = UniquePlans(entries);
  int max_nodes = 0;
  int max_depth = 0;
  double sum_nodes = 0.0;
  double sum_depth = 0.0;
  for (const PlanTree& p : plans) {
    max_nodes = std::max(max_nodes, p.node_count);
    max_depth = std::max(max_depth, p.depth);
    sum_nodes += p.node_count;
    sum_depth += p.depth;
  }
  const double n = std::max<std::size_t>(1, plans.size());
  ordered_json j;
  j["queries"] = entries.size();
  j["templates"] = templates.size();
  j["candidate_plans"] = candidates;
  j["unique_plans"] = plans.size();
  j["max_nodes"] = max_nodes;
  j["avg_nodes"] = sum_nodes / n;
  j["max_depth"] = max_depth;
  j["avg_depth"] = sum_depth / n;
  if (!o.out.empty()) WriteFile(o.out, j.dump(2) + "\n");
  out << "Queries          " << entries.size() << "\n"
      << "Templates        " << templates.size() << "\n"
      << "Candidate plans  " << candidates << "\n"
      << "Unique plans     " << plans.size() << "\n"
      << "Max Nodes        " << max_nodes << "\n"
      << "Avg. Nodes       " << Fixed(sum_nodes / n, 2) << "\n"
      << "Max Depth        " << max_depth << "\n"
      << "Avg. Depth       " << Fixed(sum_depth / n, 2) << "\n";
  return 0;
}

void PrintError(std::ostream& err, std::string_view name, int exit_code,
                const std::string& message) {
  ordered_json j;
  j["error"] = name;
  j["exit_code"] = exit_code;
  j["message"] = message;
  err << j.dump() << "\n";
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Learned hint-set ranking for query optimizers", "hintrank"};
  app.require_subcommand(1);
  Options o;

  auto add_data = [&](CLI::App* cmd, bool required) {
    auto* opt = cmd->add_option("--data", o.data, "Execution record file (repeatable)");
    if (required) opt->required();
    cmd->add_option("--catalog", o.catalog, "Hint catalog JSON (default: 49 hint sets)");
  };
  auto add_seed = [&](CLI::App* cmd) {
    cmd->add_option("--seed", o.seed, "Random seed");
  };

  CLI::App* synth = app.add_subcommand("synth", "Generate a simulated dataset");
  synth->add_option("--out", o.out, "Output record file")->required();
  synth->add_option("--catalog-out", o.catalog_out, "Where to write the catalog");
  synth->add_option("--templates", o.synth.num_templates, "Number of templates");
  synth->add_option("--queries-per-template", o.synth.queries_per_template,
                    "Queries per template");
  synth->add_option("--noise", o.synth.noise, "Multiplicative noise half-width (log scale)");
  add_seed(synth);

  CLI::App* collect = app.add_subcommand("collect", "Execute queries under every hint set");
  collect->add_option("--queries", o.queries, "Query file, one JSON object per line");
  collect->add_option("--replay", o.replay, "Serve plans and latencies from a record file");
  collect->add_option("--catalog", o.catalog, "Hint catalog JSON (default: 49 hint sets)");
  collect->add_option("--out", o.out, "Output record file (appended, resumable)")->required();
  collect->add_option("--manifest", o.manifest, "Failure manifest path");
  collect->add_option("--db-host", o.db.host, "Database host");
  collect->add_option("--db-port", o.db.port, "Database port");
  collect->add_option("--db-name", o.db.database, "Database name");
  collect->add_option("--db-user", o.db.user, "Database user");
  collect->add_option("--db-password-env", o.db.password_env,
                      "Environment variable holding the password");
  collect->add_option("--timeout-ms", o.db.timeout_ms, "Per-plan timeout in milliseconds");
  collect->add_option("--repetitions", o.db.repetitions, "Executions per plan (median kept)");

  CLI::App* split = app.add_subcommand("split", "Write a train/test split");
  add_data(split, true);
  split->add_option("--scenario", o.scenario, "adhoc or repeat");
  split->add_option("--selection", o.selection, "rand or slow");
  split->add_option("--holdout", o.holdout, "Templates (adhoc) or queries per template (repeat)");
  split->add_option("--out", o.out, "Split file")->required();
  add_seed(split);

  CLI::App* train = app.add_subcommand("train", "Train a scorer");
  add_data(train, true);
  train->add_option("--mode", o.mode, "pairwise, listwise or regression");
  train->add_option("--config", o.config, "Training config JSON");
  train->add_option("--split", o.split, "Train on the split's training queries only");
  train->add_option("--epochs", o.epochs, "Override max_epochs");
  train->add_option("--lr", o.learning_rate, "Override learning_rate");
  train->add_option("--out", o.out, "Checkpoint path")->required();
  train->add_option("--report", o.report, "Training report path");
  add_seed(train);

  CLI::App* rank = app.add_subcommand("rank", "Score every candidate plan of one query");
  add_data(rank, true);
  rank->add_option("--checkpoint", o.checkpoint, "Checkpoint path")->required();
  rank->add_option("--query-id", o.query_id, "Query to rank")->required();

  CLI::App* evaluate = app.add_subcommand("evaluate", "Evaluate a checkpoint on test queries");
  add_data(evaluate, true);
  evaluate->add_option("--checkpoint", o.checkpoint, "Checkpoint path")->required();
  evaluate->add_option("--split", o.split, "Split file; its test side is evaluated");
  evaluate->add_option("--out", o.out, "JSON report path")->required();
  evaluate->add_option("--report", o.report, "Text table path");

  CLI::App* spectrum = app.add_subcommand("spectrum", "Embedding covariance spectrum");
  add_data(spectrum, true);
  spectrum->add_option("--checkpoint", o.checkpoint, "Checkpoint path")->required();
  spectrum->add_option("--split", o.split, "Split file");
  spectrum->add_option("--population", o.population, "train, test or all");
  spectrum->add_option("--out", o.out, "JSON report path")->required();
  spectrum->add_option("--csv", o.csv, "CSV path");

  CLI::App* inspect = app.add_subcommand("inspect", "Dataset and plan tree statistics");
  add_data(inspect, true);
  inspect->add_option("--out", o.out, "Optional JSON output");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    PrintError(err, ErrorCodeName(ErrorCode::kUsage), ExitCodeFor(ErrorCode::kUsage),
               e.what());
    return ExitCodeFor(ErrorCode::kUsage);
  }

  try {
    if (synth->parsed()) return DoSynth(o, out);
    if (collect->parsed()) return DoCollect(o, out);
    if (split->parsed()) return DoSplit(o, out);
    if (train->parsed()) return DoTrain(o, out);
    if (rank->parsed()) return DoRank(o, out);
    if (evaluate->parsed()) return DoEvaluate(o, out);
    if (spectrum->parsed()) return DoSpectrum(o, out);
    if (inspect->parsed()) return DoInspect(o, out);
  } catch (const Error& e) {
    PrintError(err, ErrorCodeName(e.code()), ExitCodeFor(e.code()), e.what());
    return ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    PrintError(err, "InternalError", 1, e.what());
    return 1;
  }
  return ExitCodeFor(ErrorCode::kUsage);
}

int RunCli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return RunCli(args, std::cout, std::cerr);
}

}  // namespace hintrank
