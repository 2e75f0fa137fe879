// creaklab/embeddings.hpp

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

// Frame-embedding files ("CRKE"), the carrier for externally computed
// representations such as 20 ms self-supervised speech features:
//
//   "CRKE" | u32 version | f32 frame_hop_ms | u32 dim | u32 K | K*dim f32
//
// All fields little-endian, vectors row-major.

#ifndef CREAKLAB_EMBEDDINGS_HPP_
#define CREAKLAB_EMBEDDINGS_HPP_

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "creaklab/binary.hpp"
#include "creaklab/error.hpp"

namespace creaklab {

inline constexpr std::uint32_t kEmbeddingFormatVersion = 1;

struct EmbeddingSequence {
  float frame_hop_ms = 20.0f;
  std::size_t dim = 0;
  std::vector<float> values;  // num_frames() x dim, row-major

  std::size_t num_frames() const { return dim == 0 ? 0 : values.size() / dim; }
  std::span<const float> frame(std::size_t k) const {
    return std::span<const float>(values).subspan(k * dim, dim);
  }

  friend bool operator==(const EmbeddingSequence &,
                         const EmbeddingSequence &) = default;
};

inline void validate_embeddings(const EmbeddingSequence &e,
                                const std::string &source) {
  if (!(std::isfinite(e.frame_hop_ms) && e.frame_hop_ms > 0.0f))
    fail(ErrorKind::InvalidInput, source + ": frame_hop_ms must be positive");
  if (e.dim == 0) fail(ErrorKind::InvalidInput, source + ": dim must be >= 1");
  if (e.values.empty() || e.values.size() % e.dim != 0)
    fail(ErrorKind::InvalidInput,
         source + ": need at least one frame and a whole number of frames");
  for (std::size_t i = 0; i < e.values.size(); ++i)
    if (!std::isfinite(e.values[i]))
      fail(ErrorKind::InvalidInput, source + ": non-finite value in frame " +
                                        std::to_string(i / e.dim));
}

inline EmbeddingSequence parse_embeddings(std::span<const std::uint8_t> data,
                                          const std::string &source) {
  ByteReader r(data, source);
  auto magic = r.take(4, "magic");
  if (std::string_view(reinterpret_cast<const char *>(magic.data()), 4) !=
      "CRKE")
    fail(ErrorKind::BadMagic, source + ": expected 'CRKE' at byte 0");
  std::uint32_t version = r.u32("version");
  if (version != kEmbeddingFormatVersion)
    fail(ErrorKind::VersionUnsupported,
         source + ": version " + std::to_string(version) + " at byte 4");
  EmbeddingSequence e;
  e.frame_hop_ms = r.f32("frame_hop_ms");
  std::uint32_t dim = r.u32("dim");
  std::uint32_t frames = r.u32("frame count");
  if (dim == 0 || frames == 0)
    fail(ErrorKind::InvalidInput,
         source + ": dim and frame count must be >= 1 (byte 12)");
  const std::uint64_t count = static_cast<std::uint64_t>(dim) * frames;
  if (count > r.remaining() / 4)
    fail(ErrorKind::TruncatedFile,
         source + ": header declares " + std::to_string(frames) + " x " +
             std::to_string(dim) + " values but only " +
             std::to_string(r.remaining()) + " payload bytes follow byte " +
             std::to_string(r.offset()));
  e.dim = dim;
  e.values.resize(count);
  for (auto &v : e.values) v = r.f32("embedding value");
  if (r.remaining() != 0)
    fail(ErrorKind::InvalidInput, source + ": " +
                                      std::to_string(r.remaining()) +
                                      " trailing bytes at byte " +
                                      std::to_string(r.offset()));
  validate_embeddings(e, source);
  return e;
}

inline Bytes encode_embeddings(const EmbeddingSequence &e) {
  validate_embeddings(e, "embeddings");
  ByteWriter w;
  w.text("CRKE");
  w.u32(kEmbeddingFormatVersion);
  w.f32(e.frame_hop_ms);
  w.u32(static_cast<std::uint32_t>(e.dim));
  w.u32(static_cast<std::uint32_t>(e.num_frames()));
  for (float v : e.values) w.f32(v);
  return w.take();
}

inline EmbeddingSequence read_embeddings(const std::string &path) {
  Bytes data = read_file_bytes(path);
  return parse_embeddings(data, path);
}

inline void write_embeddings(const std::string &path,
                             const EmbeddingSequence &e) {
  Bytes bytes = encode_embeddings(e);
  write_file_bytes(path, bytes);
}

}  // namespace creaklab

#endif  // CREAKLAB_EMBEDDINGS_HPP_
