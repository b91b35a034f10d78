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

#ifndef HINTRANK_CLI_H_
#define HINTRANK_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace hintrank {

// Runs one subcommand. `args` excludes the program name. Human summaries go
// to `out`; failures print one JSON object {"error", "exit_code", "message"}
// to `err`. Returns the process exit status.
int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int RunCli(int argc, char** argv);

}  // namespace hintrank

#endif  // HINTRANK_CLI_H_
