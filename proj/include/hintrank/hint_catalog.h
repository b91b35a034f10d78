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

#ifndef HINTRANK_HINT_CATALOG_H_
#define HINTRANK_HINT_CATALOG_H_

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace hintrank {

enum Knob : int {
  kEnableHashJoin = 0,
  kEnableMergeJoin,
  kEnableNestLoop,
  kEnableIndexScan,
  kEnableSeqScan,
  kEnableIndexOnlyScan,
};

inline constexpr int kNumKnobs = 6;
inline constexpr std::array<std::string_view, kNumKnobs> kKnobNames = {
    "enable_hashjoin",  "enable_mergejoin", "enable_nestloop",
    "enable_indexscan", "enable_seqscan",   "enable_indexonlyscan"};

using HintFlags = std::array<bool, kNumKnobs>;

struct HintSet {
  int id = 0;
  HintFlags flags{};

  bool AnyJoinEnabled() const;
  bool AnyScanEnabled() const;
  bool IsValid() const { return AnyJoinEnabled() && AnyScanEnabled(); }
  bool IsAllTrue() const;
};

// An ordered list of distinct hint sets with the all-true set at id 0.
class Catalog {
 public:
  // Validates and takes ownership; ids are reassigned to list positions only
  // after checking they already match.
  explicit Catalog(std::vector<HintSet> entries);

  const std::vector<HintSet>& entries() const { return entries_; }
  int size() const { return static_cast<int>(entries_.size()); }
  const HintSet& at(int id) const;
  bool contains(int id) const { return id >= 0 && id < size(); }

  // Hex SHA-256 over the canonical JSON serialization.
  std::string Hash() const;
  std::string ToJson() const;

 private:
  std::vector<HintSet> entries_;
};

// All (non-empty join subset) x (non-empty scan subset) combinations: 49
// entries, the all-true set first, the rest in ascending flag order.
Catalog DefaultCatalog();

// Reads a JSON list of {"id": int, "flags": {knob: bool x6}}.
Catalog ParseCatalog(std::string_view json_text);

// One "SET <knob> = on|off" per knob, in kKnobNames order.
std::vector<std::string> ToSetStatements(const HintSet& hint_set);

}  // namespace hintrank

#endif  // HINTRANK_HINT_CATALOG_H_
