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

#include "hintrank/status.h"

namespace hintrank {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUsage: return "UsageError";
    case ErrorCode::kMalformedDocument: return "MalformedDocument";
    case ErrorCode::kUnsupportedArity: return "UnsupportedArity";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kDuplicateHintSet: return "DuplicateHintSet";
    case ErrorCode::kInvalidHintSet: return "InvalidHintSet";
    case ErrorCode::kMissingDefault: return "MissingDefault";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kNonFiniteGradient: return "NonFiniteGradient";
    case ErrorCode::kEmptyTree: return "EmptyTree";
    case ErrorCode::kEmptyCandidates: return "EmptyCandidates";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kFormatVersionMismatch: return "FormatVersionMismatch";
    case ErrorCode::kCorruptChecksum: return "CorruptChecksum";
    case ErrorCode::kNonPositiveLatency: return "NonPositiveLatency";
    case ErrorCode::kEmptyList: return "EmptyList";
    case ErrorCode::kEmptyDataset: return "EmptyDataset";
    case ErrorCode::kNonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::kMissingLatency: return "MissingLatency";
    case ErrorCode::kSchemaViolation: return "SchemaViolation";
    case ErrorCode::kMissingDefaultPlan: return "MissingDefaultPlan";
    case ErrorCode::kInsufficientTemplates: return "InsufficientTemplates";
    case ErrorCode::kInsufficientQueriesPerTemplate:
      return "InsufficientQueriesPerTemplate";
    case ErrorCode::kDuplicateQueryId: return "DuplicateQueryId";
    case ErrorCode::kConnectionError: return "ConnectionError";
    case ErrorCode::kSqlError: return "SqlError";
    case ErrorCode::kTimeout: return "Timeout";
    case ErrorCode::kMissingRecord: return "MissingRecord";
    case ErrorCode::kEmptyTestSet: return "EmptyTestSet";
    case ErrorCode::kNonPositiveTotal: return "NonPositiveTotal";
    case ErrorCode::kTooFewPlans: return "TooFewPlans";
    case ErrorCode::kCatalogMismatch: return "CatalogMismatch";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

}  // namespace hintrank
