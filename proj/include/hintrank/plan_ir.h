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

// Plan trees as emitted by the optimizer's EXPLAIN (FORMAT JSON), their
// binarized form, and the fixed-width node encoding fed to the scorer.

#ifndef HINTRANK_PLAN_IR_H_
#define HINTRANK_PLAN_IR_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hintrank {

// The seven operator kinds with a one-hot slot, in slot order, followed by
// the two kinds that encode to the all-zero one-hot.
enum class OperatorKind : std::uint8_t {
  kNestedLoop = 0,
  kHashJoin = 1,
  kMergeJoin = 2,
  kSeqScan = 3,
  kIndexScan = 4,
  kIndexOnlyScan = 5,
  kBitmapIndexScan = 6,
  kOther = 7,
  kNull = 8,
};

inline constexpr int kNumOneHotKinds = 7;
inline constexpr int kNodeFeatureDim = kNumOneHotKinds + 2;
inline constexpr int kCostFeature = kNumOneHotKinds;
inline constexpr int kRowsFeature = kNumOneHotKinds + 1;

// Maps an optimizer "Node Type" string to its kind; unknown names are kOther.
OperatorKind OperatorKindFromName(std::string_view node_type);
// Canonical "Node Type" spelling for the seven known kinds.
std::string_view OperatorKindName(OperatorKind kind);

struct PlanNode {
  OperatorKind kind = OperatorKind::kOther;
  // The raw "Node Type" string; "Null" for pseudo-children.
  std::string node_type;
  double est_cost = 0.0;
  double est_rows = 0.0;
  std::string relation;
  std::string index;
  std::vector<PlanNode> children;

  bool is_null() const { return kind == OperatorKind::kNull; }
  friend bool operator==(const PlanNode&, const PlanNode&) = default;
};

struct PlanTree {
  PlanNode root;
  int node_count = 0;
  int depth = 0;

  friend bool operator==(const PlanTree&, const PlanTree&) = default;
};

// Every internal node has exactly two children; single-child nodes gained a
// Null right child. Leaves keep zero children.
struct BinaryPlanTree {
  PlanNode root;
};

// Statistics of ln(1 + x) for the two numeric node features.
struct FeatureScaler {
  double cost_min = 0.0;
  double cost_max = 0.0;
  double rows_min = 0.0;
  double rows_max = 0.0;

  double ScaleCost(double cost) const;
  double ScaleRows(double rows) const;

  friend bool operator==(const FeatureScaler&, const FeatureScaler&) = default;
};

using NodeFeatures = std::array<double, kNodeFeatureDim>;

// Flattened preorder view of a binarized tree. Null pseudo-children are kept
// as entries with zero features so the shape matches the BinaryPlanTree.
struct EncodedTree {
  std::vector<NodeFeatures> features;
  std::vector<int> left;   // -1 when absent
  std::vector<int> right;  // -1 when absent
  std::vector<bool> is_null;

  int size() const { return static_cast<int>(features.size()); }
  int non_null_count() const;
};

// Parses the JSON plan document. Accepts the EXPLAIN output array, a single
// {"Plan": ...} object, or a bare plan node object.
PlanTree ParseExplain(std::string_view json_text);

// Builds a PlanTree from an in-memory root, validating arity and computing
// node_count/depth.
PlanTree MakePlanTree(PlanNode root);

BinaryPlanTree Binarize(const PlanTree& tree);
PlanTree StripNulls(const BinaryPlanTree& tree);

FeatureScaler FitScaler(std::span<const PlanTree> trees);
FeatureScaler FitScaler(std::span<const PlanTree* const> trees);

EncodedTree Encode(const BinaryPlanTree& tree, const FeatureScaler& scaler);

// Canonical serialization used for deduplication: operator types, relation
// and index names, child order. Costs and row estimates are excluded.
std::string CanonicalForm(const PlanTree& tree);
// Hex SHA-256 of CanonicalForm.
std::string Fingerprint(const PlanTree& tree);

}  // namespace hintrank

#endif  // HINTRANK_PLAN_IR_H_
