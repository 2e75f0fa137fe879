// creaklab/binary.hpp

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

// Little-endian byte buffers and whole-file helpers shared by the on-disk
// formats.

#ifndef CREAKLAB_BINARY_HPP_
#define CREAKLAB_BINARY_HPP_

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "creaklab/error.hpp"

namespace creaklab {

using Bytes = std::vector<std::uint8_t>;

inline Bytes read_file_bytes(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::IoError, "cannot open '" + path + "' for reading");
  Bytes data((std::istreambuf_iterator<char>(in)),
             std::istreambuf_iterator<char>());
  if (in.bad()) fail(ErrorKind::IoError, "read failed for '" + path + "'");
  return data;
}

inline void write_file_bytes(const std::string &path,
                             std::span<const std::uint8_t> data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::IoError, "cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char *>(data.data()),
            static_cast<std::streamsize>(data.size()));
  if (!out) fail(ErrorKind::IoError, "write failed for '" + path + "'");
}

inline void write_file_text(const std::string &path, std::string_view text) {
  write_file_bytes(path, {reinterpret_cast<const std::uint8_t *>(text.data()),
                          text.size()});
}

/// Sequential little-endian reader. Running past the end raises
/// `truncation_kind` with the source name and byte offset.
class ByteReader {
 public:
  ByteReader(std::span<const std::uint8_t> data, std::string source,
             ErrorKind truncation_kind = ErrorKind::TruncatedFile)
      : data_(data), source_(std::move(source)), kind_(truncation_kind) {}

  std::size_t offset() const { return pos_; }
  std::size_t remaining() const { return data_.size() - pos_; }
  const std::string &source() const { return source_; }

  void require(std::size_t n, std::string_view what) const {
    if (n > remaining()) {
      fail(kind_, source_ + ": truncated at byte " + std::to_string(pos_) +
                      " while reading " + std::string(what) + " (need " +
                      std::to_string(n) + ", have " +
                      std::to_string(remaining()) + ")");
    }
  }

  std::span<const std::uint8_t> take(std::size_t n, std::string_view what) {
    require(n, what);
    auto out = data_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

  void skip(std::size_t n, std::string_view what) { take(n, what); }

  std::uint16_t u16(std::string_view what) {
    auto b = take(2, what);
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
  }

  std::uint32_t u32(std::string_view what) {
    auto b = take(4, what);
    return static_cast<std::uint32_t>(b[0]) |
           (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) |
           (static_cast<std::uint32_t>(b[3]) << 24);
  }

  std::uint64_t u64(std::string_view what) {
    std::uint64_t lo = u32(what);
    std::uint64_t hi = u32(what);
    return lo | (hi << 32);
  }

  std::int16_t i16(std::string_view what) {
    return static_cast<std::int16_t>(u16(what));
  }

  float f32(std::string_view what) { return std::bit_cast<float>(u32(what)); }

 private:
  std::span<const std::uint8_t> data_;
  std::string source_;
  ErrorKind kind_;
  std::size_t pos_ = 0;
};

class ByteWriter {
 public:
  void bytes(std::span<const std::uint8_t> b) {
    buf_.insert(buf_.end(), b.begin(), b.end());
  }
  void text(std::string_view s) {
    buf_.insert(buf_.end(), s.begin(), s.end());
  }
  void u16(std::uint16_t v) {
    buf_.push_back(static_cast<std::uint8_t>(v));
    buf_.push_back(static_cast<std::uint8_t>(v >> 8));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i)
      buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    u32(static_cast<std::uint32_t>(v));
    u32(static_cast<std::uint32_t>(v >> 32));
  }
  void i16(std::int16_t v) { u16(static_cast<std::uint16_t>(v)); }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }

  const Bytes &buffer() const { return buf_; }
  Bytes take() { return std::move(buf_); }

 private:
  Bytes buf_;
};

}  // namespace creaklab

#endif  // CREAKLAB_BINARY_HPP_
