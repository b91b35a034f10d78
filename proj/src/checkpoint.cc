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

// Checkpoint layout (all integers and doubles little-endian):
//
//   magic        8 bytes  "HINTRANK"
//   version      u32      kCheckpointFormatVersion
//   header_size  u64
//   header       JSON     mode, config digest, best validation value and
//                         epoch, catalog hash, seed, layer shapes
//   values       f64 x N  scaler (cost_min, cost_max, rows_min, rows_max),
//                         then ScorerParams::Flatten() order
//   checksum     32 bytes SHA-256 of every preceding byte

#include <bit>
#include <cmath>
#include <cstring>
#include <limits>

#include "hintrank/digest.h"
#include "hintrank/io.h"
#include "hintrank/scorer.h"
#include "hintrank/status.h"
#include "json.hpp"

namespace hintrank {
namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint encoding assumes a little-endian host");

constexpr char kMagic[8] = {'H', 'I', 'N', 'T', 'R', 'A', 'N', 'K'};
constexpr std::size_t kPreambleSize = sizeof(kMagic) + 4 + 8;

template <typename T>
void Put(std::string* out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out->append(buf, sizeof(T));
}

template <typename T>
T Get(std::string_view bytes, std::size_t offset) {
  T value;
  std::memcpy(&value, bytes.data() + offset, sizeof(T));
  return value;
}

[[noreturn]] void Corrupt(const std::string& what) {
  throw Error(ErrorCode::kCorruptChecksum, "checkpoint corrupt: " + what);
}

}  // namespace

std::string SerializeCheckpoint(const Checkpoint& checkpoint) {
  const ScorerParams& p = checkpoint.params;
  nlohmann::ordered_json header;
  header["mode"] = TrainModeName(checkpoint.mode);
  header["config_digest"] = checkpoint.config_digest;
  if (std::isfinite(checkpoint.best_validation)) {
    header["best_validation"] = checkpoint.best_validation;
  } else {
    header["best_validation"] = nullptr;
  }
  header["best_epoch"] = checkpoint.best_epoch;
  header["catalog_hash"] = p.catalog_hash;
  header["seed"] = p.seed;
  header["input_dim"] = p.shape.input_dim;
  header["conv_channels"] = p.shape.conv_channels;
  header["mlp_hidden"] = p.shape.mlp_hidden;
  const std::string header_text = header.dump();

  std::string out(kMagic, sizeof(kMagic));
  Put<std::uint32_t>(&out, kCheckpointFormatVersion);
  Put<std::uint64_t>(&out, header_text.size());
  out += header_text;
  for (double v : {p.scaler.cost_min, p.scaler.cost_max, p.scaler.rows_min,
                   p.scaler.rows_max}) {
    Put<double>(&out, v);
  }
  for (double v : p.Flatten()) Put<double>(&out, v);
  const Sha256 digest = Sha256Digest(out);
  out.append(reinterpret_cast<const char*>(digest.data()), digest.size());
  return out;
}

Checkpoint DeserializeCheckpoint(std::string_view bytes) {
  if (bytes.size() < kPreambleSize) Corrupt("file too short");
  if (std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    Corrupt("bad magic; not a checkpoint file");
  }
  const auto version = Get<std::uint32_t>(bytes, sizeof(kMagic));
  if (version != kCheckpointFormatVersion) {
    throw Error(ErrorCode::kFormatVersionMismatch,
                "checkpoint format version " + std::to_string(version) +
                    " is not supported (expected " +
                    std::to_string(kCheckpointFormatVersion) + ")");
  }
  if (bytes.size() < kPreambleSize + 32) Corrupt("file too short");
  const std::string_view body = bytes.substr(0, bytes.size() - 32);
  const Sha256 digest = Sha256Digest(body);
  if (std::memcmp(digest.data(), bytes.data() + body.size(), 32) != 0) {
    Corrupt("checksum mismatch");
  }
  const auto header_size = Get<std::uint64_t>(bytes, sizeof(kMagic) + 4);
  if (header_size > body.size() - kPreambleSize) Corrupt("header overruns file");
  const auto header =
      nlohmann::json::parse(body.substr(kPreambleSize, header_size), nullptr, false);
  if (header.is_discarded() || !header.is_object()) Corrupt("unreadable header");

  Checkpoint c;
  ScorerShape shape;
  try {
    c.mode = ParseTrainMode(header.at("mode").get<std::string>());
    c.config_digest = header.at("config_digest").get<std::string>();
    c.best_validation = header.at("best_validation").is_null()
                            ? std::numeric_limits<double>::quiet_NaN()
                            : header.at("best_validation").get<double>();
    c.best_epoch = header.at("best_epoch").get<int>();
    shape.input_dim = header.at("input_dim").get<int>();
    shape.conv_channels = header.at("conv_channels").get<std::vector<int>>();
    shape.mlp_hidden = header.at("mlp_hidden").get<std::vector<int>>();
    c.params = InitParams(header.at("seed").get<std::uint64_t>(), shape);
    c.params.catalog_hash = header.at("catalog_hash").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    Corrupt(std::string("header field: ") + e.what());
  }

  const std::size_t values_offset = kPreambleSize + header_size;
  const std::size_t count = (body.size() - values_offset) / sizeof(double);
  if ((body.size() - values_offset) % sizeof(double) != 0 ||
      count != 4 + static_cast<std::size_t>(ParamCount(c.params))) {
    Corrupt("payload size does not match layer shapes");
  }
  std::vector<double> values(count);
  std::memcpy(values.data(), body.data() + values_offset, count * sizeof(double));
  c.params.scaler = FeatureScaler{values[0], values[1], values[2], values[3]};
  c.params.Unflatten(std::span<const double>(values).subspan(4));
  return c;
}

void SaveCheckpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
  WriteFile(path, SerializeCheckpoint(checkpoint));
}

Checkpoint LoadCheckpoint(const std::filesystem::path& path) {
  return DeserializeCheckpoint(ReadFile(path));
}

}  // namespace hintrank
