// creaklab/model.hpp

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

// Creak detector: an optional raw-waveform conv encoder (one embedding every
// 5 ms), a shared two-layer fully connected trunk and one logit per enabled
// head (creak, voice, pitch). At inference a frame is creak only if the
// creak probability clears its threshold and, when the voice head exists,
// the frame is also predicted voiced.
//
// Long inputs are encoded in chunks of at most max_frames_per_chunk output
// frames. Each chunk is fed context_frames() extra frames of audio on both
// sides whose outputs are discarded, so a chunk's kept frames never see the
// zero padding at its own edges.

#ifndef CREAKLAB_MODEL_HPP_
#define CREAKLAB_MODEL_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "creaklab/autograd.hpp"
#include "creaklab/checkpoint.hpp"
#include "creaklab/embeddings.hpp"
#include "creaklab/error.hpp"
#include "creaklab/model_config.hpp"
#include "creaklab/rng.hpp"
#include "creaklab/wav.hpp"

namespace creaklab {

struct FramePredictions {
  double frame_hop_ms = 5.0;
  std::vector<double> creak_prob;
  std::vector<double> voice_prob;  // empty when the voice head is disabled
  std::vector<double> pitch_prob;  // empty when the pitch head is disabled
  std::vector<bool> creak_final;

  std::size_t size() const { return creak_prob.size(); }
};

struct InferenceOptions {
  bool gate = true;
  std::optional<double> creak_threshold;  // overrides the model config
  std::optional<double> gate_threshold;
};

/// Kept-frame span of one encoder chunk.
struct ChunkSpan {
  std::size_t begin = 0;
  std::size_t count = 0;
};

/// Splits [0, num_frames) into chunks of max_frames frames. The last chunk
/// is aligned to the end, overlapping its predecessor, so every chunk of an
/// utterance with at least max_frames frames has the same length.
inline std::vector<ChunkSpan> chunk_layout(std::size_t num_frames,
                                           std::size_t max_frames) {
  std::vector<ChunkSpan> out;
  if (num_frames == 0) return out;
  if (num_frames <= max_frames) return {{0, num_frames}};
  for (std::size_t b = 0; b + max_frames <= num_frames; b += max_frames)
    out.push_back({b, max_frames});
  if (out.back().begin + max_frames < num_frames)
    out.push_back({num_frames - max_frames, max_frames});
  return out;
}

struct HeadLogits {
  nn::Tensor creak;  // [N, 1]
  nn::Tensor voice;  // undefined when disabled
  nn::Tensor pitch;
};

class CreakModel {
 public:
  explicit CreakModel(ModelConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    Rng rng(derive_seed(cfg_.rng_seed, 0x1417));
    if (cfg_.encoder) {
      int in = 1;
      for (const auto &l : cfg_.encoder->layers) {
        auto w = nn::Tensor::zeros({std::size_t(l.out_channels), std::size_t(in),
                                    std::size_t(l.kernel)},
                                   true);
        nn::kaiming_uniform(w, std::size_t(in) * l.kernel, rng);
        conv_w_.push_back(w);
        conv_b_.push_back(nn::Tensor::zeros({std::size_t(l.out_channels)}, true));
        in = l.out_channels;
      }
    }
    const auto width = std::size_t(cfg_.trunk_width);
    const auto in_dim = std::size_t(cfg_.input_dim);
    fc1_w_ = nn::Tensor::zeros({width, in_dim}, true);
    nn::kaiming_uniform(fc1_w_, in_dim, rng);
    fc1_b_ = nn::Tensor::zeros({width}, true);
    fc2_w_ = nn::Tensor::zeros({width, width}, true);
    nn::kaiming_uniform(fc2_w_, width, rng);
    fc2_b_ = nn::Tensor::zeros({width}, true);
    for (int h = 0; h < 3; ++h) {
      if (!head_enabled(h)) continue;
      head_w_[h] = nn::Tensor::zeros({1, width}, true);
      nn::kaiming_uniform(head_w_[h], width, rng);
      head_b_[h] = nn::Tensor::zeros({1}, true);
    }
  }

  // Copies own their parameters; tensors are handles, so copy by value.
  CreakModel(const CreakModel &other) : CreakModel(other.cfg_) {
    set_flat_params(other.flat_params());
  }
  CreakModel &operator=(const CreakModel &other) {
    if (this != &other) {
      CreakModel copy(other);
      *this = std::move(copy);
    }
    return *this;
  }
  CreakModel(CreakModel &&) noexcept = default;
  CreakModel &operator=(CreakModel &&) noexcept = default;

  static CreakModel from_checkpoint(const ModelCheckpoint &ckpt) {
    CreakModel m(ckpt.config);
    std::vector<double> flat(ckpt.params.begin(), ckpt.params.end());
    m.set_flat_params(flat);
    return m;
  }

  /// Parameters rounded to f32, the checkpoint precision.
  ModelCheckpoint to_checkpoint() const {
    ModelCheckpoint ckpt;
    ckpt.config = cfg_;
    for (double v : flat_params()) ckpt.params.push_back(static_cast<float>(v));
    return ckpt;
  }

  const ModelConfig &config() const { return cfg_; }
  ModelConfig &mutable_config() { return cfg_; }

  /// Parameter tensors in checkpoint order: conv layers (weight, bias), trunk
  /// fc1, fc2, then the creak / voice / pitch heads that are enabled.
  std::vector<nn::Tensor> parameters() const {
    std::vector<nn::Tensor> p;
    for (std::size_t i = 0; i < conv_w_.size(); ++i) {
      p.push_back(conv_w_[i]);
      p.push_back(conv_b_[i]);
    }
    p.insert(p.end(), {fc1_w_, fc1_b_, fc2_w_, fc2_b_});
    for (int h = 0; h < 3; ++h)
      if (head_enabled(h)) {
        p.push_back(head_w_[h]);
        p.push_back(head_b_[h]);
      }
    return p;
  }

  std::vector<nn::Tensor> classifier_parameters() const {
    std::vector<nn::Tensor> p{fc1_w_, fc1_b_, fc2_w_, fc2_b_};
    for (int h = 0; h < 3; ++h)
      if (head_enabled(h)) {
        p.push_back(head_w_[h]);
        p.push_back(head_b_[h]);
      }
    return p;
  }

  long long param_count() const {
    long long n = 0;
    for (const auto &t : parameters()) n += static_cast<long long>(t.numel());
    return n;
  }

  std::vector<double> flat_params() const {
    std::vector<double> flat;
    for (const auto &t : parameters())
      flat.insert(flat.end(), t.data().begin(), t.data().end());
    return flat;
  }

  void set_flat_params(std::span<const double> flat) {
    if (static_cast<long long>(flat.size()) != param_count())
      fail(ErrorKind::ParamCountMismatch,
           "got " + std::to_string(flat.size()) + " parameters, model has " +
               std::to_string(param_count()));
    std::size_t pos = 0;
    for (auto t : parameters()) {
      auto dst = t.mutable_data();
      std::copy(flat.begin() + pos, flat.begin() + pos + dst.size(), dst.begin());
      pos += dst.size();
    }
  }

  bool has_encoder() const { return cfg_.encoder.has_value(); }

  const EncoderConfig &encoder_config() const {
    if (!cfg_.encoder) fail(ErrorKind::BadConfig, "model has no waveform encoder");
    return *cfg_.encoder;
  }

  /// Number of encoder frames for a waveform of `samples` samples.
  std::size_t num_frames(std::size_t samples) const {
    return samples / static_cast<std::size_t>(encoder_config().stride_product());
  }

  /// Samples fed to the encoder for a chunk with `count` kept frames.
  std::size_t chunk_input_samples(std::size_t count) const {
    const auto &enc = encoder_config();
    return (count + 2 * std::size_t(enc.context_frames())) *
           static_cast<std::size_t>(enc.stride_product());
  }

  /// Copies the chunk's input window (kept frames plus context) from the
  /// waveform into `dst`, zero-filling outside the signal.
  void fill_chunk_input(std::span<const double> samples, ChunkSpan chunk,
                        std::span<double> dst) const {
    const auto &enc = encoder_config();
    const auto hop = static_cast<long long>(enc.stride_product());
    const long long start =
        (static_cast<long long>(chunk.begin) - enc.context_frames()) * hop;
    for (std::size_t i = 0; i < dst.size(); ++i) {
      const long long s = start + static_cast<long long>(i);
      dst[i] = (s >= 0 && s < static_cast<long long>(samples.size()))
                   ? samples[static_cast<std::size_t>(s)]
                   : 0.0;
    }
  }

  /// Plain (unchunked) encoder pass. input: [B, 1, L] -> [B, N, L'].
  nn::Tensor encode_batch(const nn::Tensor &input) const {
    const auto &enc = encoder_config();
    nn::Tensor x = input;
    for (std::size_t i = 0; i < conv_w_.size(); ++i) {
      x = nn::conv1d(x, conv_w_[i], conv_b_[i], std::size_t(enc.layers[i].stride),
                     std::size_t(enc.layers[i].padding));
      if (i + 1 < conv_w_.size()) x = nn::relu(x);
    }
    return x;
  }

  /// Encodes a batch of equally sized chunks; returns [B * count, N] rows of
  /// kept frames.
  nn::Tensor encode_chunks(const nn::Tensor &input, std::size_t count) const {
    nn::Tensor z = encode_batch(input);
    return nn::frames(z, std::size_t(encoder_config().context_frames()), count);
  }

  /// Frame embeddings ([K, N] row-major, K = floor(T / 80)) via chunking.
  std::vector<double> embed(const Waveform &w) const {
    const auto &enc = encoder_config();
    if (w.samples.size() < static_cast<std::size_t>(enc.receptive_field()))
      fail(ErrorKind::TooShort,
           "waveform has " + std::to_string(w.samples.size()) +
               " samples, encoder needs at least " +
               std::to_string(enc.receptive_field()));
    const std::size_t k_total = num_frames(w.samples.size());
    const auto dim = std::size_t(enc.embedding_dim());
    std::vector<double> out(k_total * dim);
    nn::NoGradGuard no_grad;
    for (ChunkSpan chunk :
         chunk_layout(k_total, std::size_t(enc.max_frames_per_chunk))) {
      const std::size_t len = chunk_input_samples(chunk.count);
      std::vector<double> buf(len);
      fill_chunk_input(w.samples, chunk, buf);
      nn::Tensor rows = encode_chunks(
          nn::Tensor::from_data({1, 1, len}, std::move(buf)), chunk.count);
      std::copy(rows.data().begin(), rows.data().end(),
                out.begin() + static_cast<std::ptrdiff_t>(chunk.begin * dim));
    }
    return out;
  }

  EmbeddingSequence encode(const Waveform &w) const {
    std::vector<double> z = embed(w);
    EmbeddingSequence e;
    e.frame_hop_ms = static_cast<float>(cfg_.frame_hop_ms);
    e.dim = std::size_t(cfg_.input_dim);
    e.values.assign(z.begin(), z.end());
    return e;
  }

  /// Trunk + heads over [N, input_dim] rows.
  HeadLogits classify_logits(const nn::Tensor &z, bool training,
                             Rng *dropout_rng) const {
    if (z.rank() != 2 || z.dim(1) != std::size_t(cfg_.input_dim))
      fail(ErrorKind::DimMismatch,
           "classifier expects " + std::to_string(cfg_.input_dim) +
               "-dimensional frames, got " + nn::shape_str(z.shape()));
    const bool drop = training && cfg_.dropout > 0.0;
    if (drop && dropout_rng == nullptr)
      fail(ErrorKind::InvalidInput, "training with dropout needs an Rng");
    nn::Tensor h = nn::relu(nn::linear(z, fc1_w_, fc1_b_));
    if (drop) h = nn::dropout(h, cfg_.dropout, *dropout_rng, true);
    h = nn::relu(nn::linear(h, fc2_w_, fc2_b_));
    if (drop) h = nn::dropout(h, cfg_.dropout, *dropout_rng, true);
    HeadLogits out;
    out.creak = nn::linear(h, head_w_[0], head_b_[0]);
    if (cfg_.heads.voice) out.voice = nn::linear(h, head_w_[1], head_b_[1]);
    if (cfg_.heads.pitch) out.pitch = nn::linear(h, head_w_[2], head_b_[2]);
    return out;
  }

  /// Probabilities and gated creak decisions for [N, input_dim] rows.
  FramePredictions classify_rows(std::span<const double> rows, std::size_t n,
                                 const InferenceOptions &opt = {}) const {
    if (rows.size() != n * std::size_t(cfg_.input_dim))
      fail(ErrorKind::DimMismatch, "embedding rows do not match input_dim " +
                                       std::to_string(cfg_.input_dim));
    nn::NoGradGuard no_grad;
    HeadLogits logits = classify_logits(
        nn::Tensor::from_data({n, std::size_t(cfg_.input_dim)},
                              std::vector<double>(rows.begin(), rows.end())),
        false, nullptr);
    FramePredictions p;
    p.frame_hop_ms = cfg_.frame_hop_ms;
    auto probs = [](const nn::Tensor &t) {
      std::vector<double> out(t.numel());
      for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = nn::detail::stable_sigmoid(t.data()[i]);
      return out;
    };
    p.creak_prob = probs(logits.creak);
    if (logits.voice.defined()) p.voice_prob = probs(logits.voice);
    if (logits.pitch.defined()) p.pitch_prob = probs(logits.pitch);
    const double creak_thr = opt.creak_threshold.value_or(cfg_.creak_threshold);
    const double gate_thr = opt.gate_threshold.value_or(cfg_.gate_threshold);
    p.creak_final.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      bool creak = p.creak_prob[k] >= creak_thr;
      if (opt.gate && cfg_.heads.voice) creak = creak && p.voice_prob[k] >= gate_thr;
      p.creak_final[k] = creak;
    }
    return p;
  }

  /// Classifier over an embedding sequence; predictions keep its frame hop.
  FramePredictions classify(const EmbeddingSequence &z,
                            const InferenceOptions &opt = {}) const {
    if (z.dim != std::size_t(cfg_.input_dim))
      fail(ErrorKind::DimMismatch,
           std::to_string(z.dim) + "-dimensional embeddings into a " +
               std::to_string(cfg_.input_dim) + "-dimensional classifier");
    std::vector<double> rows(z.values.begin(), z.values.end());
    FramePredictions p = classify_rows(rows, z.num_frames(), opt);
    p.frame_hop_ms = z.frame_hop_ms;
    return p;
  }

  /// End-to-end detection on a waveform (full-precision embeddings).
  FramePredictions predict(const Waveform &w,
                           const InferenceOptions &opt = {}) const {
    std::vector<double> z = embed(w);
    return classify_rows(z, num_frames(w.samples.size()), opt);
  }

 private:
  bool head_enabled(int h) const {
    return h == 0 ? cfg_.heads.creak : h == 1 ? cfg_.heads.voice : cfg_.heads.pitch;
  }

  ModelConfig cfg_;
  std::vector<nn::Tensor> conv_w_, conv_b_;
  nn::Tensor fc1_w_, fc1_b_, fc2_w_, fc2_b_;
  nn::Tensor head_w_[3], head_b_[3];
};

}  // namespace creaklab

#endif  // CREAKLAB_MODEL_HPP_
