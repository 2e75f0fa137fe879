// creaklab/model_config.hpp

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

// Architecture descriptions. These are plain data and know how to count their
// parameters and round-trip through JSON, which is what the checkpoint format
// embeds.

#ifndef CREAKLAB_MODEL_CONFIG_HPP_
#define CREAKLAB_MODEL_CONFIG_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "creaklab/error.hpp"
#include "creaklab/wav.hpp"

namespace creaklab {

/// Upper bound on any single layer dimension; keeps parameter arithmetic far
/// from overflow when configs come from untrusted files.
inline constexpr int kMaxWidth = 1 << 16;

struct ConvLayerSpec {
  int out_channels = 0;
  int kernel = 1;
  int stride = 1;
  int padding = 0;

  friend bool operator==(const ConvLayerSpec &, const ConvLayerSpec &) = default;
};

/// Raw-waveform convolutional encoder. One output frame per
/// `stride_product()` input samples.
struct EncoderConfig {
  std::vector<ConvLayerSpec> layers;
  int max_frames_per_chunk = 100;

  friend bool operator==(const EncoderConfig &, const EncoderConfig &) = default;

  /// 5 layers, 80-sample hop (5 ms), receptive field 1625 samples, ~1.6M
  /// parameters.
  static EncoderConfig deepfry_default() {
    EncoderConfig cfg;
    const int channels[] = {64, 128, 128, 256, 256};
    const int kernels[] = {15, 11, 11, 11, 13};
    const int strides[] = {5, 4, 2, 2, 1};
    for (int i = 0; i < 5; ++i)
      cfg.layers.push_back({channels[i], kernels[i], strides[i], kernels[i] / 2});
    return cfg;
  }

  // Products saturate so hostile configs cannot overflow before validation.
  static long long sat_mul(long long a, long long b) {
    constexpr long long cap = 1LL << 40;
    return (a > cap || b > cap || a * b > cap) ? cap : a * b;
  }

  long long stride_product() const {
    long long p = 1;
    for (const auto &l : layers) p = sat_mul(p, l.stride);
    return p;
  }

  long long receptive_field() const {
    long long rf = 1, jump = 1;
    for (const auto &l : layers) {
      rf += sat_mul(l.kernel - 1, jump);
      jump = sat_mul(jump, l.stride);
    }
    return rf;
  }

  /// Input samples an output frame reaches to the left / right of its
  /// anchor sample (frame k is anchored at sample k * stride_product()).
  long long left_extent() const {
    long long ext = 0, jump = 1;
    for (const auto &l : layers) {
      ext += sat_mul(l.padding, jump);
      jump = sat_mul(jump, l.stride);
    }
    return ext;
  }
  long long right_extent() const {
    long long ext = 0, jump = 1;
    for (const auto &l : layers) {
      ext += sat_mul(std::max(0, l.kernel - 1 - l.padding), jump);
      jump = sat_mul(jump, l.stride);
    }
    return ext;
  }

  /// Context frames added on each side of a chunk so that its core frames
  /// see no chunk-boundary padding.
  int context_frames() const {
    long long ext = std::max(left_extent(), right_extent());
    return static_cast<int>((ext + stride_product() - 1) / stride_product());
  }

  int embedding_dim() const {
    return layers.empty() ? 0 : layers.back().out_channels;
  }

  double frame_hop_ms() const {
    return 1000.0 * static_cast<double>(stride_product()) / kSampleRate;
  }

  long long param_count() const {
    long long n = 0;
    int in = 1;
    for (const auto &l : layers) {
      n += static_cast<long long>(l.out_channels) * in * l.kernel +
           l.out_channels;
      in = l.out_channels;
    }
    return n;
  }

  void validate() const {
    if (layers.empty() || layers.size() > 64)
      fail(ErrorKind::BadConfig, "encoder must have 1..64 layers");
    for (std::size_t i = 0; i < layers.size(); ++i) {
      const auto &l = layers[i];
      const std::string where = "encoder layer " + std::to_string(i) + ": ";
      if (l.out_channels < 1 || l.kernel < 1 || l.stride < 1 || l.padding < 0)
        fail(ErrorKind::BadConfig, where + "channels, kernel and stride must "
                                           "be >= 1, padding >= 0");
      if (l.out_channels > kMaxWidth || l.kernel > kMaxWidth ||
          l.stride > kMaxWidth)
        fail(ErrorKind::BadConfig, where + "dimension exceeds " +
                                       std::to_string(kMaxWidth));
      // Guarantees out_len == in_len / stride whenever stride divides in_len.
      if (2 * l.padding < l.kernel - l.stride || 2 * l.padding > l.kernel - 1)
        fail(ErrorKind::BadConfig,
             where + "padding " + std::to_string(l.padding) +
                 " must satisfy kernel - stride <= 2*padding <= kernel - 1");
    }
    if (stride_product() != 80)
      fail(ErrorKind::BadConfig,
           "stride product is " + std::to_string(stride_product()) +
               ", must be 80 samples (5 ms at 16 kHz)");
    if (receptive_field() < 1600)
      fail(ErrorKind::BadConfig,
           "receptive field is " + std::to_string(receptive_field()) +
               " samples, must be >= 1600 (100 ms)");
    if (max_frames_per_chunk < 1 || max_frames_per_chunk > kMaxWidth)
      fail(ErrorKind::BadConfig, "max_frames_per_chunk out of range");
  }
};

struct HeadSet {
  bool creak = true;
  bool voice = true;
  bool pitch = true;

  friend bool operator==(const HeadSet &, const HeadSet &) = default;

  int count() const { return int(creak) + int(voice) + int(pitch); }

  std::string to_string() const {
    std::string s = "creak";
    if (voice) s += ",voice";
    if (pitch) s += ",pitch";
    return s;
  }

  /// Parses "creak,voice,pitch"-style lists. The creak head is mandatory.
  static HeadSet parse(const std::string &text) {
    HeadSet h{false, false, false};
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t comma = text.find(',', pos);
      if (comma == std::string::npos) comma = text.size();
      std::string item = text.substr(pos, comma - pos);
      if (item == "creak") h.creak = true;
      else if (item == "voice") h.voice = true;
      else if (item == "pitch") h.pitch = true;
      else fail(ErrorKind::BadConfig, "unknown head '" + item + "'");
      pos = comma + 1;
    }
    if (!h.creak) fail(ErrorKind::BadConfig, "the creak head is required");
    return h;
  }
};

/// Full model description: optional waveform encoder, shared two-layer trunk
/// and one logit per enabled head.
struct ModelConfig {
  std::optional<EncoderConfig> encoder;
  int input_dim = 0;  // classifier input width
  double frame_hop_ms = 5.0;
  int trunk_width = 256;
  HeadSet heads;
  double creak_threshold = 0.5;
  double gate_threshold = 0.5;
  double dropout = 0.1;
  std::uint64_t rng_seed = 0;

  friend bool operator==(const ModelConfig &, const ModelConfig &) = default;

  static ModelConfig deepfry(HeadSet heads = {}, std::uint64_t seed = 0) {
    ModelConfig cfg;
    cfg.encoder = EncoderConfig::deepfry_default();
    cfg.input_dim = cfg.encoder->embedding_dim();
    cfg.frame_hop_ms = cfg.encoder->frame_hop_ms();
    cfg.heads = heads;
    cfg.rng_seed = seed;
    return cfg;
  }

  static ModelConfig embedding_classifier(int dim, double hop_ms,
                                          HeadSet heads = {},
                                          std::uint64_t seed = 0) {
    ModelConfig cfg;
    cfg.input_dim = dim;
    cfg.frame_hop_ms = hop_ms;
    cfg.heads = heads;
    cfg.dropout = 0.0;
    cfg.rng_seed = seed;
    return cfg;
  }

  long long classifier_param_count() const {
    const long long w = trunk_width;
    return (static_cast<long long>(input_dim) * w + w) + (w * w + w) +
           heads.count() * (w + 1);
  }

  long long param_count() const {
    return (encoder ? encoder->param_count() : 0) + classifier_param_count();
  }

  void validate() const {
    if (encoder) {
      encoder->validate();
      if (input_dim != encoder->embedding_dim())
        fail(ErrorKind::BadConfig, "input_dim must equal the encoder's "
                                   "embedding dimension");
      if (std::abs(frame_hop_ms - encoder->frame_hop_ms()) > 1e-9)
        fail(ErrorKind::BadConfig, "frame_hop_ms disagrees with the encoder");
    }
    if (input_dim < 1 || input_dim > kMaxWidth)
      fail(ErrorKind::BadConfig, "input_dim out of range");
    if (trunk_width < 1 || trunk_width > kMaxWidth)
      fail(ErrorKind::BadConfig, "trunk_width out of range");
    if (!(frame_hop_ms > 0.0) || !std::isfinite(frame_hop_ms))
      fail(ErrorKind::BadConfig, "frame_hop_ms must be positive");
    if (!heads.creak) fail(ErrorKind::BadConfig, "the creak head is required");
    if (!(dropout >= 0.0 && dropout < 1.0))
      fail(ErrorKind::BadConfig, "dropout must be in [0, 1)");
    if (!(creak_threshold >= 0.0 && creak_threshold <= 1.0) ||
        !(gate_threshold >= 0.0 && gate_threshold <= 1.0))
      fail(ErrorKind::BadConfig, "thresholds must be in [0, 1]");
  }
};

inline nlohmann::json to_json(const ModelConfig &cfg) {
  nlohmann::json j;
  j["format"] = "creaklab-model";
  if (cfg.encoder) {
    nlohmann::json layers = nlohmann::json::array();
    for (const auto &l : cfg.encoder->layers)
      layers.push_back({{"out_channels", l.out_channels},
                        {"kernel", l.kernel},
                        {"stride", l.stride},
                        {"padding", l.padding}});
    j["encoder"] = {{"layers", layers},
                    {"max_frames_per_chunk", cfg.encoder->max_frames_per_chunk}};
  } else {
    j["encoder"] = nullptr;
  }
  j["input_dim"] = cfg.input_dim;
  j["frame_hop_ms"] = cfg.frame_hop_ms;
  j["trunk_width"] = cfg.trunk_width;
  j["heads"] = {{"creak", cfg.heads.creak},
                {"voice", cfg.heads.voice},
                {"pitch", cfg.heads.pitch}};
  j["creak_threshold"] = cfg.creak_threshold;
  j["gate_threshold"] = cfg.gate_threshold;
  j["dropout"] = cfg.dropout;
  j["rng_seed"] = cfg.rng_seed;
  return j;
}

namespace detail {

/// Integer field bounded by 2^24 in magnitude; floats are rejected rather than
/// truncated.
inline int json_int(const nlohmann::json &j, const char *key) {
  const auto &v = j.at(key);
  if (!v.is_number_integer())
    fail(ErrorKind::BadConfig, std::string("model config: '") + key +
                                   "' must be an integer");
  const auto x = v.get<std::int64_t>();
  if (v.is_number_unsigned() && v.get<std::uint64_t>() > (1u << 24))
    fail(ErrorKind::BadConfig, std::string("model config: '") + key + "' out of range");
  if (x < -(1 << 24) || x > (1 << 24))
    fail(ErrorKind::BadConfig, std::string("model config: '") + key + "' out of range");
  return static_cast<int>(x);
}

}  // namespace detail

inline ModelConfig model_config_from_json(const nlohmann::json &j) {
  try {
    ModelConfig cfg;
    if (j.at("format").get<std::string>() != "creaklab-model")
      fail(ErrorKind::BadConfig, "config 'format' is not creaklab-model");
    const auto &enc = j.at("encoder");
    if (!enc.is_null()) {
      EncoderConfig e;
      for (const auto &l : enc.at("layers"))
        e.layers.push_back({detail::json_int(l, "out_channels"),
                            detail::json_int(l, "kernel"), detail::json_int(l, "stride"),
                            detail::json_int(l, "padding")});
      e.max_frames_per_chunk = detail::json_int(enc, "max_frames_per_chunk");
      cfg.encoder = std::move(e);
    }
    cfg.input_dim = detail::json_int(j, "input_dim");
    cfg.frame_hop_ms = j.at("frame_hop_ms").get<double>();
    cfg.trunk_width = detail::json_int(j, "trunk_width");
    const auto &h = j.at("heads");
    cfg.heads = {h.at("creak").get<bool>(), h.at("voice").get<bool>(),
                 h.at("pitch").get<bool>()};
    cfg.creak_threshold = j.at("creak_threshold").get<double>();
    cfg.gate_threshold = j.at("gate_threshold").get<double>();
    cfg.dropout = j.at("dropout").get<double>();
    cfg.rng_seed = j.at("rng_seed").get<std::uint64_t>();
    cfg.validate();
    return cfg;
  } catch (const nlohmann::json::exception &e) {
    fail(ErrorKind::BadConfig, std::string("model config: ") + e.what());
  }
}

}  // namespace creaklab

#endif  // CREAKLAB_MODEL_CONFIG_HPP_
