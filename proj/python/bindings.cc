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

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "hintrank/cli.h"
#include "hintrank/datastore.h"
#include "hintrank/eval.h"
#include "hintrank/hint_catalog.h"
#include "hintrank/io.h"
#include "hintrank/ltr.h"
#include "hintrank/plan_ir.h"
#include "hintrank/scorer.h"
#include "hintrank/status.h"
#include "hintrank/trainer.h"

namespace py = pybind11;

namespace hintrank {
namespace {

Catalog CatalogFrom(const std::optional<std::string>& path) {
  return path ? ParseCatalog(ReadFile(*path)) : DefaultCatalog();
}

std::vector<QueryEntry> Load(const std::vector<std::string>& paths, const Catalog& catalog) {
  std::vector<QueryEntry> merged;
  for (const std::string& p : paths) {
    merged = MergeDatasets(merged, GroupQueries(LoadRecords(p), catalog));
  }
  return merged;
}

Checkpoint MatchingCheckpoint(const std::string& path, const Catalog& catalog) {
  Checkpoint c = LoadCheckpoint(path);
  if (c.params.catalog_hash != catalog.Hash()) {
    throw Error(ErrorCode::kCatalogMismatch, "checkpoint was trained with another catalog");
  }
  return c;
}

py::dict PlanSummary(const std::string& explain_json) {
  const PlanTree t = ParseExplain(explain_json);
  py::dict d;
  d["node_count"] = t.node_count;
  d["depth"] = t.depth;
  d["fingerprint"] = Fingerprint(t);
  d["canonical"] = CanonicalForm(t);
  return d;
}

py::list Queries(const std::vector<std::string>& paths, const std::optional<std::string>& cat) {
  py::list out;
  for (const QueryEntry& e : Load(paths, CatalogFrom(cat))) {
    py::list cands;
    for (const CandidatePlan& c : e.candidates) {
      py::dict cd;
      cd["fingerprint"] = c.fingerprint;
      cd["latency_ms"] = c.latency_ms;
      cd["hint_set_ids"] = c.hint_set_ids;
      cd["node_count"] = c.plan.node_count;
      cands.append(cd);
    }
    py::dict d;
    d["query_id"] = e.query_id;
    d["template_id"] = e.template_id;
    d["default_latency"] = e.default_latency;
    d["candidates"] = cands;
    out.append(d);
  }
  return out;
}

// Returns the training report as JSON text.
std::string TrainModel(const std::vector<std::string>& paths, const std::string& out,
                       const std::string& mode, const std::optional<std::string>& catalog_path,
                       const std::optional<std::string>& split_path,
                       std::optional<int> max_epochs, std::uint64_t seed) {
  const Catalog catalog = CatalogFrom(catalog_path);
  std::vector<QueryEntry> entries = Load(paths, catalog);
  if (split_path) {
    entries = SelectQueries(entries, SplitFromJson(ReadFile(*split_path)).train);
  }
  TrainConfig cfg;
  cfg.mode = ParseTrainMode(mode);
  cfg.seed = seed;
  if (max_epochs) cfg.max_epochs = *max_epochs;
  TrainResult r;
  {
    py::gil_scoped_release release;
    r = Train(entries, catalog.Hash(), cfg);
  }
  SaveCheckpoint(r.checkpoint, out);
  return r.report.ToJson();
}

std::string EvaluateModel(const std::vector<std::string>& paths, const std::string& checkpoint,
                          const std::optional<std::string>& catalog_path,
                          const std::optional<std::string>& split_path) {
  const Catalog catalog = CatalogFrom(catalog_path);
  const Checkpoint ckpt = MatchingCheckpoint(checkpoint, catalog);
  std::vector<QueryEntry> entries = Load(paths, catalog);
  std::string label = "all";
  if (split_path) {
    const SplitResult split = SplitFromJson(ReadFile(*split_path));
    entries = SelectQueries(entries, split.test);
    label = std::string(ScenarioName(split.spec.scenario)) + "-" +
            std::string(SelectionName(split.spec.selection));
  }
  EvalReport rep = Evaluate(ckpt.params, entries);
  rep.label = label;
  return rep.ToJson();
}

std::string Spectrum(const nn::Matrix& embeddings) {
  return SpectrumFromEmbeddings(embeddings).ToJson();
}

std::tuple<double, std::vector<double>> Pairwise(const std::vector<double>& scores,
                                                 const std::vector<std::pair<int, int>>& pairs) {
  std::vector<ltr::PairSample> samples;
  for (const auto& [w, l] : pairs) samples.push_back({"", w, l});
  ltr::LossAndGrad lg = ltr::PairwiseLossAndGrad(samples, scores);
  return {lg.loss, std::move(lg.grad)};
}

std::tuple<double, std::vector<double>> Listwise(const std::vector<double>& ordered_scores) {
  ltr::LossAndGrad lg = ltr::ListwiseLossAndGrad(ordered_scores);
  return {lg.loss, std::move(lg.grad)};
}

std::tuple<int, std::string, std::string> Cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code;
  {
    py::gil_scoped_release release;
    code = RunCli(args, out, err);
  }
  return {code, out.str(), err.str()};
}

}  // namespace
}  // namespace hintrank

PYBIND11_MODULE(_core, m) {
  using namespace hintrank;
  m.doc() = "Hint set ranking: plan parsing, training, evaluation.";

  static py::exception<Error> error(m, "HintrankError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const std::string msg = std::string(ErrorCodeName(e.code())) + ": " + e.what();
      PyErr_SetString(error.ptr(), msg.c_str());
    }
  });

  m.def(
      "param_count",
      [](std::vector<int> conv_channels, std::vector<int> mlp_hidden) {
        ScorerShape s;
        s.conv_channels = std::move(conv_channels);
        s.mlp_hidden = std::move(mlp_hidden);
        return ParamCount(s);
      },
      py::arg("conv_channels") = std::vector<int>{256, 128, 64},
      py::arg("mlp_hidden") = std::vector<int>{32});
  m.def("parse_plan", &PlanSummary, py::arg("explain_json"));
  m.def("default_catalog_json", [] { return DefaultCatalog().ToJson(); });
  m.def("catalog_hash", [](const std::string& json) { return ParseCatalog(json).Hash(); });
  m.def("load_queries", &Queries, py::arg("data"), py::arg("catalog") = py::none());
  m.def("train", &TrainModel, py::arg("data"), py::arg("out"), py::arg("mode") = "pairwise",
        py::arg("catalog") = py::none(), py::arg("split") = py::none(),
        py::arg("max_epochs") = py::none(), py::arg("seed") = 0);
  m.def("evaluate", &EvaluateModel, py::arg("data"), py::arg("checkpoint"),
        py::arg("catalog") = py::none(), py::arg("split") = py::none());
  m.def("spectrum", &Spectrum, py::arg("embeddings"));
  m.def("pairwise_loss", &Pairwise, py::arg("scores"), py::arg("pairs"));
  m.def("listwise_loss", &Listwise, py::arg("ordered_scores"));
  m.def("run_cli", &Cli, py::arg("args"));
}
