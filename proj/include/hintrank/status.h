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

#ifndef HINTRANK_STATUS_H_
#define HINTRANK_STATUS_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace hintrank {

// Every failure raised by the library carries one of these codes. The CLI
// maps each code to a distinct process exit status (see ExitCodeFor).
enum class ErrorCode {
  kUsage = 1,
  kMalformedDocument,
  kUnsupportedArity,
  kEmptyCorpus,
  kDuplicateHintSet,
  kInvalidHintSet,
  kMissingDefault,
  kDimensionMismatch,
  kShapeMismatch,
  kNonFiniteGradient,
  kEmptyTree,
  kEmptyCandidates,
  kIoError,
  kFormatVersionMismatch,
  kCorruptChecksum,
  kNonPositiveLatency,
  kEmptyList,
  kEmptyDataset,
  kNonFiniteLoss,
  kMissingLatency,
  kSchemaViolation,
  kMissingDefaultPlan,
  kInsufficientTemplates,
  kInsufficientQueriesPerTemplate,
  kDuplicateQueryId,
  kConnectionError,
  kSqlError,
  kTimeout,
  kMissingRecord,
  kEmptyTestSet,
  kNonPositiveTotal,
  kTooFewPlans,
  kCatalogMismatch,
  kInvalidConfig,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Exit statuses start at 10 so they never collide with 1 (generic failure)
// or 2 (argument parsing errors reported by the parser itself).
inline int ExitCodeFor(ErrorCode code) {
  return code == ErrorCode::kUsage ? 2 : 10 + static_cast<int>(code);
}

}  // namespace hintrank

#endif  // HINTRANK_STATUS_H_
