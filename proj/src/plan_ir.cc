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

#include "hintrank/plan_ir.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "hintrank/digest.h"
#include "hintrank/status.h"
#include "json.hpp"

namespace hintrank {
namespace {

using nlohmann::json;

constexpr std::array<std::string_view, kNumOneHotKinds> kKnownNames = {
    "Nested Loop", "Hash Join",       "Merge Join",       "Seq Scan",
    "Index Scan",  "Index Only Scan", "Bitmap Index Scan"};

[[noreturn]] void Malformed(const std::string& what) {
  throw Error(ErrorCode::kMalformedDocument, "malformed plan document: " + what);
}

double RequireNonNegative(const json& node, const char* key) {
  auto it = node.find(key);
  if (it == node.end()) Malformed(std::string("missing \"") + key + "\"");
  if (!it->is_number()) Malformed(std::string("\"") + key + "\" is not numeric");
  const double value = it->get<double>();
  if (!std::isfinite(value) || value < 0.0) {
    Malformed(std::string("\"") + key + "\" must be finite and >= 0");
  }
  return value;
}

std::string OptionalString(const json& node, const char* key) {
  auto it = node.find(key);
  if (it == node.end() || it->is_null()) return {};
  if (!it->is_string()) Malformed(std::string("\"") + key + "\" is not a string");
  return it->get<std::string>();
}

PlanNode ParseNode(const json& node) {
  if (!node.is_object()) Malformed("plan node is not an object");
  auto type_it = node.find("Node Type");
  if (type_it == node.end() || !type_it->is_string()) {
    Malformed("missing \"Node Type\"");
  }
  PlanNode out;
  out.node_type = type_it->get<std::string>();
  out.kind = OperatorKindFromName(out.node_type);
  out.est_cost = RequireNonNegative(node, "Total Cost");
  out.est_rows = RequireNonNegative(node, "Plan Rows");
  out.relation = OptionalString(node, "Relation Name");
  out.index = OptionalString(node, "Index Name");
  if (auto plans = node.find("Plans"); plans != node.end()) {
    if (!plans->is_array()) Malformed("\"Plans\" is not an array");
    if (plans->size() > 2) {
      throw Error(ErrorCode::kUnsupportedArity,
                  "node \"" + out.node_type + "\" has " +
                      std::to_string(plans->size()) +
                      " children; at most 2 are supported");
    }
    for (const json& child : *plans) out.children.push_back(ParseNode(child));
  }
  return out;
}

void Measure(const PlanNode& node, int level, int* count, int* depth) {
  if (node.children.size() > 2) {
    throw Error(ErrorCode::kUnsupportedArity,
                "node \"" + node.node_type + "\" has more than 2 children");
  }
  ++*count;
  *depth = std::max(*depth, level);
  for (const PlanNode& c : node.children) Measure(c, level + 1, count, depth);
}

PlanNode NullNode() {
  PlanNode n;
  n.kind = OperatorKind::kNull;
  n.node_type = "Null";
  return n;
}

PlanNode BinarizeNode(const PlanNode& node) {
  PlanNode out = node;
  out.children.clear();
  for (const PlanNode& c : node.children) out.children.push_back(BinarizeNode(c));
  if (out.children.size() == 1) out.children.push_back(NullNode());
  return out;
}

PlanNode StripNode(const PlanNode& node) {
  PlanNode out = node;
  out.children.clear();
  for (const PlanNode& c : node.children) {
    if (!c.is_null()) out.children.push_back(StripNode(c));
  }
  return out;
}

void ScanStats(const PlanNode& node, FeatureScaler* s, bool* first) {
  if (!node.is_null()) {
    const double c = std::log1p(node.est_cost);
    const double r = std::log1p(node.est_rows);
    if (*first) {
      s->cost_min = s->cost_max = c;
      s->rows_min = s->rows_max = r;
      *first = false;
    } else {
      s->cost_min = std::min(s->cost_min, c);
      s->cost_max = std::max(s->cost_max, c);
      s->rows_min = std::min(s->rows_min, r);
      s->rows_max = std::max(s->rows_max, r);
    }
  }
  for (const PlanNode& c : node.children) ScanStats(c, s, first);
}

double MinMax(double x, double lo, double hi) {
  if (!(hi > lo)) return 0.0;
  return std::clamp((std::log1p(x) - lo) / (hi - lo), 0.0, 1.0);
}

int EncodeNode(const PlanNode& node, const FeatureScaler& scaler,
               EncodedTree* out) {
  const int index = out->size();
  NodeFeatures f{};
  if (!node.is_null()) {
    if (node.kind != OperatorKind::kOther) f[static_cast<int>(node.kind)] = 1.0;
    f[kCostFeature] = scaler.ScaleCost(node.est_cost);
    f[kRowsFeature] = scaler.ScaleRows(node.est_rows);
  }
  out->features.push_back(f);
  out->left.push_back(-1);
  out->right.push_back(-1);
  out->is_null.push_back(node.is_null());
  if (!node.children.empty()) {
    const int l = EncodeNode(node.children[0], scaler, out);
    out->left[index] = l;
  }
  if (node.children.size() > 1) {
    const int r = EncodeNode(node.children[1], scaler, out);
    out->right[index] = r;
  }
  return index;
}

void Canonicalize(const PlanNode& node, std::string* out) {
  out->push_back('(');
  out->append(json(node.node_type).dump());
  out->push_back(' ');
  out->append(json(node.relation).dump());
  out->push_back(' ');
  out->append(json(node.index).dump());
  for (const PlanNode& c : node.children) Canonicalize(c, out);
  out->push_back(')');
}

}  // namespace

OperatorKind OperatorKindFromName(std::string_view node_type) {
  for (int i = 0; i < kNumOneHotKinds; ++i) {
    if (kKnownNames[i] == node_type) return static_cast<OperatorKind>(i);
  }
  if (node_type == "Null") return OperatorKind::kNull;
  return OperatorKind::kOther;
}

std::string_view OperatorKindName(OperatorKind kind) {
  const int i = static_cast<int>(kind);
  if (i < kNumOneHotKinds) return kKnownNames[i];
  return kind == OperatorKind::kNull ? "Null" : "Other";
}

double FeatureScaler::ScaleCost(double cost) const {
  return MinMax(cost, cost_min, cost_max);
}

double FeatureScaler::ScaleRows(double rows) const {
  return MinMax(rows, rows_min, rows_max);
}

int EncodedTree::non_null_count() const {
  return static_cast<int>(std::count(is_null.begin(), is_null.end(), false));
}

PlanTree ParseExplain(std::string_view json_text) {
  json doc = json::parse(json_text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) Malformed("not valid JSON");
  if (doc.is_array()) {
    if (doc.empty()) Malformed("empty plan array");
    doc = doc[0];
  }
  if (!doc.is_object()) Malformed("expected an object");
  if (auto plan = doc.find("Plan"); plan != doc.end()) {
    return MakePlanTree(ParseNode(*plan));
  }
  return MakePlanTree(ParseNode(doc));
}

PlanTree MakePlanTree(PlanNode root) {
  PlanTree tree;
  Measure(root, 1, &tree.node_count, &tree.depth);
  tree.root = std::move(root);
  return tree;
}

BinaryPlanTree Binarize(const PlanTree& tree) {
  return BinaryPlanTree{BinarizeNode(tree.root)};
}

PlanTree StripNulls(const BinaryPlanTree& tree) {
  return MakePlanTree(StripNode(tree.root));
}

FeatureScaler FitScaler(std::span<const PlanTree* const> trees) {
  FeatureScaler scaler;
  bool first = true;
  for (const PlanTree* t : trees) ScanStats(t->root, &scaler, &first);
  if (first) throw Error(ErrorCode::kEmptyCorpus, "cannot fit scaler on no plans");
  return scaler;
}

FeatureScaler FitScaler(std::span<const PlanTree> trees) {
  std::vector<const PlanTree*> ptrs;
  ptrs.reserve(trees.size());
  for (const PlanTree& t : trees) ptrs.push_back(&t);
  return FitScaler(std::span<const PlanTree* const>(ptrs));
}

EncodedTree Encode(const BinaryPlanTree& tree, const FeatureScaler& scaler) {
  EncodedTree out;
  EncodeNode(tree.root, scaler, &out);
  return out;
}

std::string CanonicalForm(const PlanTree& tree) {
  std::string out;
  Canonicalize(tree.root, &out);
  return out;
}

std::string Fingerprint(const PlanTree& tree) {
  return Sha256Hex(CanonicalForm(tree));
}

}  // namespace hintrank
