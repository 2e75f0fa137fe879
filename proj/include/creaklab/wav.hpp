// creaklab/wav.hpp

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

#ifndef CREAKLAB_WAV_HPP_
#define CREAKLAB_WAV_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "creaklab/binary.hpp"
#include "creaklab/error.hpp"

namespace creaklab {

/// Every model and tracker in the toolkit runs at this rate.
inline constexpr int kSampleRate = 16000;

struct Waveform {
  std::vector<double> samples;  // amplitudes in [-1, 1]
  int sample_rate_hz = kSampleRate;

  std::size_t size() const { return samples.size(); }
  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }
};

struct WavReadOptions {
  /// When false, any rate other than 16 kHz is a RateMismatch error.
  bool resample = false;
};

/// Linear-interpolation resampler. Good enough for the offline 22.05/44.1 kHz
/// to 16 kHz conversion; no anti-alias filtering is applied.
inline std::vector<double> resample_linear(std::span<const double> in,
                                           int from_hz, int to_hz) {
  if (from_hz <= 0 || to_hz <= 0)
    fail(ErrorKind::InvalidInput, "resample: rates must be positive");
  if (in.empty()) return {};
  if (from_hz == to_hz) return {in.begin(), in.end()};
  const auto n_out = static_cast<std::size_t>(std::max<long long>(
      1, std::llround(static_cast<double>(in.size()) * to_hz / from_hz)));
  std::vector<double> out(n_out);
  const double step = static_cast<double>(from_hz) / to_hz;
  for (std::size_t i = 0; i < n_out; ++i) {
    double pos = static_cast<double>(i) * step;
    auto i0 = static_cast<std::size_t>(pos);
    if (i0 + 1 >= in.size()) {
      out[i] = in.back();
      continue;
    }
    double frac = pos - static_cast<double>(i0);
    out[i] = in[i0] + frac * (in[i0 + 1] - in[i0]);
  }
  return out;
}

/// Parses a RIFF/WAVE PCM16 mono buffer. `source` names the buffer in
/// diagnostics.
inline Waveform parse_wav(std::span<const std::uint8_t> data,
                          const std::string &source,
                          const WavReadOptions &options = {}) {
  ByteReader r(data, source, ErrorKind::NotWav);
  if (data.size() < 12 || std::string_view(reinterpret_cast<const char *>(
                                               data.data()), 4) != "RIFF" ||
      std::string_view(reinterpret_cast<const char *>(data.data()) + 8, 4) !=
          "WAVE") {
    fail(ErrorKind::NotWav, source + ": missing RIFF/WAVE header at byte 0");
  }
  r.skip(12, "RIFF header");

  bool have_fmt = false;
  std::uint16_t channels = 0, bits = 0;
  std::uint32_t rate = 0;
  std::span<const std::uint8_t> payload;
  bool have_data = false;

  while (r.remaining() >= 8 && !have_data) {
    const std::size_t chunk_at = r.offset();
    auto id_bytes = r.take(4, "chunk id");
    std::string_view id(reinterpret_cast<const char *>(id_bytes.data()), 4);
    std::uint32_t size = r.u32("chunk size");
    if (id == "fmt ") {
      if (size < 16)
        fail(ErrorKind::NotWav, source + ": fmt chunk too small at byte " +
                                    std::to_string(chunk_at));
      ByteReader fmt(r.take(size, "fmt chunk"), source, ErrorKind::NotWav);
      std::uint16_t format = fmt.u16("audio format");
      channels = fmt.u16("channel count");
      rate = fmt.u32("sample rate");
      fmt.u32("byte rate");
      fmt.u16("block align");
      bits = fmt.u16("bits per sample");
      if (format != 1)
        fail(ErrorKind::UnsupportedFormat,
             source + ": compression code " + std::to_string(format) +
                 " at byte " + std::to_string(chunk_at + 8) +
                 " (only PCM is supported)");
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt)
        fail(ErrorKind::NotWav, source + ": data chunk before fmt at byte " +
                                    std::to_string(chunk_at));
      payload = r.take(size, "data chunk");
      have_data = true;
      break;
    } else {
      r.skip(size, "chunk body");
    }
    if ((size & 1U) && r.remaining() > 0) r.skip(1, "chunk pad byte");
  }
  if (!have_fmt) fail(ErrorKind::NotWav, source + ": no fmt chunk");
  if (!have_data) fail(ErrorKind::NotWav, source + ": no data chunk");
  if (channels != 1)
    fail(ErrorKind::UnsupportedFormat,
         source + ": " + std::to_string(channels) +
             " channels (only mono is supported)");
  if (bits != 16)
    fail(ErrorKind::UnsupportedFormat,
         source + ": " + std::to_string(bits) +
             "-bit samples (only PCM16 is supported)");
  if (rate < 1000 || rate > 1'000'000)
    fail(ErrorKind::UnsupportedFormat,
         source + ": implausible sample rate " + std::to_string(rate));

  const std::size_t n = payload.size() / 2;
  if (n == 0) fail(ErrorKind::InvalidInput, source + ": no samples");
  std::vector<double> samples(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto v = static_cast<std::int16_t>(payload[2 * i] |
                                       (payload[2 * i + 1] << 8));
    samples[i] = static_cast<double>(v) / 32768.0;
  }

  Waveform w;
  if (rate != static_cast<std::uint32_t>(kSampleRate)) {
    if (!options.resample)
      fail(ErrorKind::RateMismatch,
           source + ": sample rate " + std::to_string(rate) +
               " Hz, expected 16000 Hz (enable resampling to convert)");
    w.samples = resample_linear(samples, static_cast<int>(rate), kSampleRate);
  } else {
    w.samples = std::move(samples);
  }
  w.sample_rate_hz = kSampleRate;
  return w;
}

inline Waveform read_wav(const std::string &path,
                         const WavReadOptions &options = {}) {
  Bytes data = read_file_bytes(path);
  return parse_wav(data, path, options);
}

inline std::int16_t quantize_pcm16(double x) {
  double scaled = std::round(std::clamp(x, -1.0, 1.0) * 32768.0);
  return static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0));
}

inline Bytes encode_wav(const Waveform &w) {
  if (w.samples.empty())
    fail(ErrorKind::InvalidInput, "cannot encode an empty waveform");
  if (w.sample_rate_hz <= 0)
    fail(ErrorKind::InvalidInput, "sample rate must be positive");
  const auto data_bytes = static_cast<std::uint32_t>(w.samples.size() * 2);
  ByteWriter out;
  out.text("RIFF");
  out.u32(36 + data_bytes);
  out.text("WAVE");
  out.text("fmt ");
  out.u32(16);
  out.u16(1);  // PCM
  out.u16(1);  // mono
  out.u32(static_cast<std::uint32_t>(w.sample_rate_hz));
  out.u32(static_cast<std::uint32_t>(w.sample_rate_hz) * 2);
  out.u16(2);
  out.u16(16);
  out.text("data");
  out.u32(data_bytes);
  for (double x : w.samples) {
    if (!std::isfinite(x))
      fail(ErrorKind::InvalidInput, "non-finite sample in waveform");
    out.i16(quantize_pcm16(x));
  }
  return out.take();
}

inline void write_wav(const std::string &path, const Waveform &w) {
  Bytes bytes = encode_wav(w);
  write_file_bytes(path, bytes);
}

}  // namespace creaklab

#endif  // CREAKLAB_WAV_HPP_
