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

#ifndef HINTRANK_IO_H_
#define HINTRANK_IO_H_

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <string_view>
#include <utility>

namespace hintrank {

// All of these throw IoError naming the path.
std::string ReadFile(const std::filesystem::path& path);
void WriteFile(const std::filesystem::path& path, std::string_view contents);
void AppendLine(const std::filesystem::path& path, std::string_view line);

// Uniform draws on top of std::mt19937_64, whose raw output sequence is fixed
// by the standard. <random> distributions are implementation-defined, so they
// are avoided wherever bytes must be reproducible.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed);
  std::uint64_t Next();
  // Uniform in [0, 1).
  double Uniform();
  // Uniform in [0, n); n > 0.
  std::uint64_t Below(std::uint64_t n);

  template <typename It>
  void Shuffle(It first, It last) {
    const auto n = static_cast<std::uint64_t>(last - first);
    for (std::uint64_t i = n; i > 1; --i) {
      std::swap(first[i - 1], first[Below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace hintrank

#endif  // HINTRANK_IO_H_
