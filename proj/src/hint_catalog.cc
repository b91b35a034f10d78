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

#include "hintrank/hint_catalog.h"

#include <algorithm>
#include <set>
#include <utility>

#include "hintrank/digest.h"
#include "hintrank/status.h"
#include "json.hpp"

namespace hintrank {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string Describe(const HintSet& h) {
  std::string s = "hint set " + std::to_string(h.id) + " {";
  for (int k = 0; k < kNumKnobs; ++k) {
    s += std::string(kKnobNames[k]) + (h.flags[k] ? "=on" : "=off");
    if (k + 1 < kNumKnobs) s += ", ";
  }
  return s + "}";
}

}  // namespace

bool HintSet::AnyJoinEnabled() const {
  return flags[kEnableHashJoin] || flags[kEnableMergeJoin] ||
         flags[kEnableNestLoop];
}

bool HintSet::AnyScanEnabled() const {
  return flags[kEnableIndexScan] || flags[kEnableSeqScan] ||
         flags[kEnableIndexOnlyScan];
}

bool HintSet::IsAllTrue() const {
  return std::all_of(flags.begin(), flags.end(), [](bool b) { return b; });
}

Catalog::Catalog(std::vector<HintSet> entries) : entries_(std::move(entries)) {
  if (entries_.empty() || !entries_[0].IsAllTrue()) {
    throw Error(ErrorCode::kMissingDefault,
                "catalog entry 0 must enable every knob");
  }
  std::set<HintFlags> seen;
  for (int i = 0; i < size(); ++i) {
    const HintSet& h = entries_[i];
    if (h.id != i) {
      throw Error(ErrorCode::kMalformedDocument,
                  "catalog ids must be 0..n-1 in order; found id " +
                      std::to_string(h.id) + " at position " + std::to_string(i));
    }
    if (!h.IsValid()) {
      throw Error(ErrorCode::kInvalidHintSet,
                  Describe(h) + " enables no join method or no scan method");
    }
    if (!seen.insert(h.flags).second) {
      throw Error(ErrorCode::kDuplicateHintSet, Describe(h) + " is repeated");
    }
  }
}

const HintSet& Catalog::at(int id) const {
  if (!contains(id)) {
    throw Error(ErrorCode::kInvalidHintSet,
                "hint set id " + std::to_string(id) + " not in catalog");
  }
  return entries_[id];
}

std::string Catalog::ToJson() const {
  ordered_json list = ordered_json::array();
  for (const HintSet& h : entries_) {
    ordered_json flags = ordered_json::object();
    for (int k = 0; k < kNumKnobs; ++k) flags[std::string(kKnobNames[k])] = h.flags[k];
    list.push_back(ordered_json{{"id", h.id}, {"flags", flags}});
  }
  return list.dump();
}

std::string Catalog::Hash() const { return Sha256Hex(ToJson()); }

Catalog DefaultCatalog() {
  std::vector<HintFlags> combos;
  for (int joins = 1; joins < 8; ++joins) {
    for (int scans = 1; scans < 8; ++scans) {
      HintFlags f{};
      f[kEnableHashJoin] = joins & 1;
      f[kEnableMergeJoin] = joins & 2;
      f[kEnableNestLoop] = joins & 4;
      f[kEnableIndexScan] = scans & 1;
      f[kEnableSeqScan] = scans & 2;
      f[kEnableIndexOnlyScan] = scans & 4;
      combos.push_back(f);
    }
  }
  std::sort(combos.begin(), combos.end());
  // The all-true tuple sorts last; move it to the front.
  std::rotate(combos.rbegin(), combos.rbegin() + 1, combos.rend());
  std::vector<HintSet> entries;
  for (int i = 0; i < static_cast<int>(combos.size()); ++i) {
    entries.push_back(HintSet{i, combos[i]});
  }
  return Catalog(std::move(entries));
}

Catalog ParseCatalog(std::string_view json_text) {
  const json doc = json::parse(json_text, nullptr, false);
  if (doc.is_discarded() || !doc.is_array()) {
    throw Error(ErrorCode::kMalformedDocument,
                "catalog must be a JSON list of hint sets");
  }
  std::vector<HintSet> entries;
  for (const json& item : doc) {
    if (!item.is_object() || !item.contains("id") || !item["id"].is_number_integer() ||
        !item.contains("flags") || !item["flags"].is_object()) {
      throw Error(ErrorCode::kMalformedDocument,
                  "catalog entry needs an integer \"id\" and a \"flags\" object");
    }
    HintSet h;
    h.id = item["id"].get<int>();
    const json& flags = item["flags"];
    if (flags.size() != kNumKnobs) {
      throw Error(ErrorCode::kInvalidHintSet,
                  "hint set " + std::to_string(h.id) + " must assign exactly " +
                      std::to_string(kNumKnobs) + " knobs");
    }
    for (int k = 0; k < kNumKnobs; ++k) {
      auto it = flags.find(std::string(kKnobNames[k]));
      if (it == flags.end() || !it->is_boolean()) {
        throw Error(ErrorCode::kInvalidHintSet,
                    "hint set " + std::to_string(h.id) + " lacks boolean " +
                        std::string(kKnobNames[k]));
      }
      h.flags[k] = it->get<bool>();
    }
    entries.push_back(h);
  }
  return Catalog(std::move(entries));
}

std::vector<std::string> ToSetStatements(const HintSet& hint_set) {
  std::vector<std::string> out;
  out.reserve(kNumKnobs);
  for (int k = 0; k < kNumKnobs; ++k) {
    out.push_back("SET " + std::string(kKnobNames[k]) + " = " +
                  (hint_set.flags[k] ? "on" : "off"));
  }
  return out;
}

}  // namespace hintrank
