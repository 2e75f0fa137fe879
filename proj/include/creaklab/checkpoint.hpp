// creaklab/checkpoint.hpp

// Copyright 2026  The creaklab Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

// Model checkpoints ("CRKM"):
//
//   "CRKM" | u32 version | u32 json_len | config JSON | u64 n | n f32 params
//
// The JSON is written with sorted keys so identical configs give identical
// bytes.

#ifndef CREAKLAB_CHECKPOINT_HPP_
#define CREAKLAB_CHECKPOINT_HPP_

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "creaklab/binary.hpp"
#include "creaklab/error.hpp"
#include "creaklab/model_config.hpp"

namespace creaklab {

inline constexpr std::uint32_t kCheckpointFormatVersion = 1;

struct ModelCheckpoint {
  std::uint32_t format_version = kCheckpointFormatVersion;
  ModelConfig config;
  std::vector<float> params;

  std::uint64_t rng_seed() const { return config.rng_seed; }

  friend bool operator==(const ModelCheckpoint &,
                         const ModelCheckpoint &) = default;
};

inline Bytes encode_checkpoint(const ModelCheckpoint &ckpt) {
  ckpt.config.validate();
  if (static_cast<long long>(ckpt.params.size()) != ckpt.config.param_count())
    fail(ErrorKind::ParamCountMismatch,
         "checkpoint has " + std::to_string(ckpt.params.size()) +
             " parameters, config implies " +
             std::to_string(ckpt.config.param_count()));
  if (ckpt.format_version != kCheckpointFormatVersion)
    fail(ErrorKind::VersionUnsupported,
         "cannot write checkpoint version " +
             std::to_string(ckpt.format_version));
  const std::string json = to_json(ckpt.config).dump();
  ByteWriter w;
  w.text("CRKM");
  w.u32(ckpt.format_version);
  w.u32(static_cast<std::uint32_t>(json.size()));
  w.text(json);
  w.u64(ckpt.params.size());
  for (float p : ckpt.params) w.f32(p);
  return w.take();
}

inline ModelCheckpoint parse_checkpoint(std::span<const std::uint8_t> data,
                                        const std::string &source) {
  ByteReader r(data, source);
  auto magic = r.take(4, "magic");
  if (std::string_view(reinterpret_cast<const char *>(magic.data()), 4) !=
      "CRKM")
    fail(ErrorKind::BadMagic, source + ": expected 'CRKM' at byte 0");
  ModelCheckpoint ckpt;
  ckpt.format_version = r.u32("version");
  if (ckpt.format_version != kCheckpointFormatVersion)
    fail(ErrorKind::VersionUnsupported,
         source + ": version " + std::to_string(ckpt.format_version) +
             " at byte 4");
  std::uint32_t json_len = r.u32("config length");
  const std::size_t json_at = r.offset();
  auto json_bytes = r.take(json_len, "config JSON");
  nlohmann::json j = nlohmann::json::parse(json_bytes.begin(), json_bytes.end(),
                                           nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded())
    fail(ErrorKind::BadConfig,
         source + ": config JSON at byte " + std::to_string(json_at) +
             " does not parse");
  try {
    ckpt.config = model_config_from_json(j);
  } catch (const Error &e) {
    fail(e.kind(), source + ": " + e.what());
  }
  const std::size_t count_at = r.offset();
  std::uint64_t n = r.u64("parameter count");
  const auto expected = static_cast<std::uint64_t>(ckpt.config.param_count());
  if (n != expected)
    fail(ErrorKind::ParamCountMismatch,
         source + ": byte " + std::to_string(count_at) + " declares " +
             std::to_string(n) + " parameters, config implies " +
             std::to_string(expected));
  if (n > r.remaining() / 4)
    fail(ErrorKind::TruncatedFile,
         source + ": parameter payload truncated after byte " +
             std::to_string(r.offset()));
  ckpt.params.resize(n);
  for (auto &p : ckpt.params) {
    p = r.f32("parameter");
    if (!std::isfinite(p))
      fail(ErrorKind::InvalidInput,
           source + ": non-finite parameter before byte " +
               std::to_string(r.offset()));
  }
  if (r.remaining() != 0)
    fail(ErrorKind::InvalidInput, source + ": trailing bytes at byte " +
                                      std::to_string(r.offset()));
  return ckpt;
}

inline void save_checkpoint(const std::string &path,
                            const ModelCheckpoint &ckpt) {
  Bytes bytes = encode_checkpoint(ckpt);
  write_file_bytes(path, bytes);
}

inline ModelCheckpoint load_checkpoint(const std::string &path) {
  Bytes data = read_file_bytes(path);
  return parse_checkpoint(data, path);
}

}  // namespace creaklab

#endif  // CREAKLAB_CHECKPOINT_HPP_
