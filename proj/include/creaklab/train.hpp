// creaklab/train.hpp

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

// Multi-head training. Frame labels come from interval tiers by midpoint
// lookup; the pitch target is the tracker's defined/undefined mask on the
// model grid. Each batch loss is the weighted sum of one masked BCE term per
// enabled head, minimized with Adam. The checkpoint kept is the one with
// the best validation creak F1 on the 20 ms grid.
//
// Everything is sequential in a fixed order, so a seed fixes the loss
// trajectory and the checkpoint bytes.

#ifndef CREAKLAB_TRAIN_HPP_
#define CREAKLAB_TRAIN_HPP_

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "creaklab/adam.hpp"
#include "creaklab/autograd.hpp"
#include "creaklab/embeddings.hpp"
#include "creaklab/error.hpp"
#include "creaklab/eval.hpp"
#include "creaklab/labels.hpp"
#include "creaklab/model.hpp"
#include "creaklab/parallel.hpp"
#include "creaklab/pitch.hpp"
#include "creaklab/rng.hpp"
#include "creaklab/wav.hpp"

namespace creaklab {

/// Per-frame multi-labels. loss_mask marks frames inside the annotated span
/// (the creak and voice heads train only there); pitch covers every frame.
struct FrameLabels {
  double frame_hop_ms = 5.0;
  std::vector<bool> creak, voiced, pitch, loss_mask;

  std::size_t size() const { return creak.size(); }

  void validate() const {
    const std::size_t n = creak.size();
    if (voiced.size() != n || pitch.size() != n || loss_mask.size() != n)
      fail(ErrorKind::GridMismatch, "frame label streams differ in length");
    for (std::size_t k = 0; k < n; ++k)
      if (creak[k] && !voiced[k])
        fail(ErrorKind::LabelContradiction,
             "frame " + std::to_string(k) + " is creak but not voiced");
  }
};

/// Rasterizes "creak" and "voice" tiers onto frame midpoints (k + 0.5) * hop.
/// A frame is annotated when its midpoint lies in an interval of any tier;
/// a missing tier is an empty one.
inline FrameLabels labels_from_intervals(const std::vector<IntervalTier> &tiers,
                                         double frame_hop_ms,
                                         std::size_t num_frames,
                                         const std::vector<bool> &pitch_mask) {
  if (!(frame_hop_ms > 0.0))
    fail(ErrorKind::InvalidInput, "frame hop must be positive");
  if (pitch_mask.size() != num_frames)
    fail(ErrorKind::GridMismatch,
         "pitch mask has " + std::to_string(pitch_mask.size()) +
             " frames, expected " + std::to_string(num_frames));
  const IntervalTier *creak = find_tier(tiers, "creak");
  const IntervalTier *voice = find_tier(tiers, "voice");
  FrameLabels out;
  out.frame_hop_ms = frame_hop_ms;
  out.creak.assign(num_frames, false);
  out.voiced.assign(num_frames, false);
  out.loss_mask.assign(num_frames, false);
  out.pitch = pitch_mask;
  for (std::size_t k = 0; k < num_frames; ++k) {
    const double t = (static_cast<double>(k) + 0.5) * frame_hop_ms / 1000.0;
    out.creak[k] = creak != nullptr && creak->find(t) != nullptr;
    out.voiced[k] = voice != nullptr && voice->find(t) != nullptr;
    bool annotated = false;
    for (const auto &tier : tiers)
      if (tier.find(t) != nullptr) {
        annotated = true;
        break;
      }
    out.loss_mask[k] = annotated;
  }
  out.validate();
  return out;
}

struct TrainConfig {
  int epochs = 14;
  double lr = 0.001;
  std::size_t batch_size = 16;
  double dropout = 0.1;
  std::uint64_t seed = 7;
  HeadSet heads;
  std::array<double, 3> head_loss_weights{1.0, 1.0, 1.0};  // creak, voice, pitch

  /// Classifier-only defaults for external embeddings.
  static TrainConfig embedding_defaults() {
    TrainConfig cfg;
    cfg.epochs = 6;
    return cfg;
  }

  void validate() const {
    if (epochs < 1) fail(ErrorKind::BadConfig, "epochs must be >= 1");
    if (!(lr > 0.0) || !std::isfinite(lr))
      fail(ErrorKind::BadConfig, "learning rate must be positive");
    if (batch_size < 1) fail(ErrorKind::BadConfig, "batch size must be >= 1");
    if (!(dropout >= 0.0 && dropout < 1.0))
      fail(ErrorKind::BadConfig, "dropout must be in [0, 1)");
    if (!heads.creak) fail(ErrorKind::BadConfig, "the creak head is required");
    for (double w : head_loss_weights)
      if (!(w >= 0.0) || !std::isfinite(w))
        fail(ErrorKind::BadConfig, "head loss weights must be finite and >= 0");
  }
};

inline nlohmann::json to_json(const TrainConfig &cfg) {
  return {{"epochs", cfg.epochs},
          {"lr", cfg.lr},
          {"batch_size", cfg.batch_size},
          {"dropout", cfg.dropout},
          {"seed", cfg.seed},
          {"heads", cfg.heads.to_string()},
          {"head_loss_weights", cfg.head_loss_weights}};
}

/// Overlays the keys present in `j` on `base`.
inline TrainConfig train_config_from_json(const nlohmann::json &j,
                                          TrainConfig base = {}) {
  try {
    if (!j.is_object()) fail(ErrorKind::BadConfig, "train config must be an object");
    if (j.contains("epochs")) base.epochs = j.at("epochs").get<int>();
    if (j.contains("lr")) base.lr = j.at("lr").get<double>();
    if (j.contains("batch_size")) base.batch_size = j.at("batch_size").get<std::size_t>();
    if (j.contains("dropout")) base.dropout = j.at("dropout").get<double>();
    if (j.contains("seed")) base.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("heads")) base.heads = HeadSet::parse(j.at("heads").get<std::string>());
    if (j.contains("head_loss_weights"))
      base.head_loss_weights = j.at("head_loss_weights").get<std::array<double, 3>>();
  } catch (const nlohmann::json::exception &e) {
    fail(ErrorKind::BadConfig, std::string("train config: ") + e.what());
  }
  base.validate();
  return base;
}

/// One utterance ready for training or scoring.
struct Utterance {
  std::string id;
  Waveform wave;
  std::vector<IntervalTier> tiers;
  FrameLabels labels;
};

/// Pitch options used for the pitch-head target: one tracker frame per
/// model frame, 50..350 Hz.
inline PitchOptions target_pitch_options(double frame_hop_ms) {
  PitchOptions opt;
  opt.time_step_s = frame_hop_ms / 1000.0;
  opt.floor_hz = 50.0;
  opt.ceiling_hz = 350.0;
  return opt;
}

inline Utterance make_utterance(std::string id, Waveform wave,
                                std::vector<IntervalTier> tiers,
                                const EncoderConfig &enc) {
  Utterance u{std::move(id), std::move(wave), std::move(tiers), {}};
  if (u.wave.samples.size() < static_cast<std::size_t>(enc.receptive_field()))
    fail(ErrorKind::TooShort, u.id + ": utterance shorter than the encoder's "
                                     "receptive field");
  const std::size_t k = u.wave.samples.size() /
                        static_cast<std::size_t>(enc.stride_product());
  const double hop = enc.frame_hop_ms();
  const PitchTrack pt = track_pitch(u.wave, target_pitch_options(hop));
  u.labels = labels_from_intervals(u.tiers, hop, k, pitch_defined_mask(pt, hop, k));
  return u;
}

/// Mean per-head and total loss; a head absent from the run stays empty.
struct LossBreakdown {
  std::optional<double> creak, voice, pitch;
  double total = 0.0;
};

inline nlohmann::json to_json(const LossBreakdown &l) {
  nlohmann::json j = nlohmann::json::object();
  if (l.creak) j["creak"] = *l.creak;
  if (l.voice) j["voice"] = *l.voice;
  if (l.pitch) j["pitch"] = *l.pitch;
  j["total"] = l.total;
  return j;
}

struct EpochMetrics {
  int epoch = 0;
  std::size_t batches = 0;
  LossBreakdown loss;  // means over the epoch's batches
  std::optional<SubsetReport> val;
};

inline nlohmann::json to_json(const EpochMetrics &m) {
  nlohmann::json j = {{"epoch", m.epoch}, {"batches", m.batches}, {"loss", to_json(m.loss)}};
  if (m.val)
    j["val"] = {{"precision", m.val->precision},
                {"recall", m.val->recall},
                {"f1", m.val->f1}};
  else
    j["val"] = nullptr;
  return j;
}

struct TrainResult {
  ModelCheckpoint checkpoint;
  int best_epoch = 0;
  std::optional<double> best_val_f1;
  std::vector<EpochMetrics> epochs;
  std::vector<LossBreakdown> batches;  // weighted terms of every step
};

namespace detail {

/// Accumulates the weighted BCE terms for one batch.
struct BatchLoss {
  nn::Tensor total;
  LossBreakdown values;

  void add(const nn::Tensor &logits, const std::vector<bool> &targets,
           const std::vector<bool> &mask, double weight,
           std::optional<double> LossBreakdown::*slot) {
    bool any = false;
    for (bool m : mask) any = any || m;
    if (!any || weight == 0.0) return;
    nn::Tensor term = nn::scale(nn::bce_with_logits(logits, targets, mask), weight);
    values.*slot = term.item();
    total = total.defined() ? nn::add(total, term) : term;
  }
};

inline void check_loss(const nn::Tensor &total, int epoch, std::size_t batch) {
  if (!std::isfinite(total.item()))
    fail(ErrorKind::DivergedLoss, "loss is " + std::to_string(total.item()) +
                                      " at epoch " + std::to_string(epoch) +
                                      ", batch " + std::to_string(batch));
}

inline void zero_grads(std::vector<nn::Tensor> &params) {
  for (auto &p : params) p.zero_grad();
}

/// Running means of the logged terms.
struct LossMeans {
  std::array<double, 3> sum{};
  std::array<std::size_t, 3> count{};
  double total = 0.0;
  std::size_t batches = 0;

  void add(const LossBreakdown &l) {
    const std::optional<double> *terms[3] = {&l.creak, &l.voice, &l.pitch};
    for (int h = 0; h < 3; ++h)
      if (*terms[h]) {
        sum[h] += **terms[h];
        ++count[h];
      }
    total += l.total;
    ++batches;
  }
  LossBreakdown mean() const {
    LossBreakdown l;
    std::optional<double> *terms[3] = {&l.creak, &l.voice, &l.pitch};
    for (int h = 0; h < 3; ++h)
      if (count[h]) *terms[h] = sum[h] / double(batches);
    l.total = batches ? total / double(batches) : 0.0;
    return l;
  }
};

inline void emit(std::ostream *log, const EpochMetrics &m) {
  if (log) *log << to_json(m).dump() << '\n' << std::flush;
}

}  // namespace detail

/// Creak scores of a model on labelled utterances (20 ms grid, gate on).
inline EvalReport evaluate_model(const CreakModel &model,
                                 const std::vector<Utterance> &data) {
  EvalReport report;
  for (const auto &u : data) {
    const FramePredictions pred = model.predict(u.wave);
    const std::vector<bool> grid = to_eval_grid(pred, u.wave.duration_s());
    const std::vector<bool> ref =
        rasterize_tier(find_tier(u.tiers, "creak"), grid.size());
    accumulate(report, grid, ref, find_tier(u.tiers, "phone"));
  }
  return report;
}

/// Trains a waveform model in place and returns the best checkpoint.
/// `model` must have an encoder and the same heads as `cfg`.
inline TrainResult train(CreakModel &model, const std::vector<Utterance> &train_set,
                         const std::vector<Utterance> &val_set,
                         const TrainConfig &cfg, std::ostream *log = nullptr) {
  cfg.validate();
  if (train_set.empty()) fail(ErrorKind::EmptyDataset, "no training utterances");
  if (!model.has_encoder())
    fail(ErrorKind::BadConfig, "train() needs a waveform encoder");
  if (!(model.config().heads == cfg.heads))
    fail(ErrorKind::BadConfig, "model heads " + model.config().heads.to_string() +
                                   " differ from training heads " +
                                   cfg.heads.to_string());
  model.mutable_config().dropout = cfg.dropout;
  const EncoderConfig &enc = model.encoder_config();
  const std::size_t max_frames = std::size_t(enc.max_frames_per_chunk);

  struct Item {
    std::size_t utt;
    ChunkSpan chunk;
  };
  std::vector<Item> items;
  for (std::size_t u = 0; u < train_set.size(); ++u) {
    const auto &utt = train_set[u];
    const std::size_t k = model.num_frames(utt.wave.samples.size());
    if (k == 0 || utt.labels.size() != k)
      fail(ErrorKind::GridMismatch, utt.id + ": labels do not match the frame grid");
    for (ChunkSpan c : chunk_layout(k, max_frames)) items.push_back({u, c});
  }

  std::vector<nn::Tensor> params = model.parameters();
  nn::AdamState adam;
  adam.lr = cfg.lr;
  TrainResult result;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    Rng order(derive_seed(cfg.seed, 100 + std::uint64_t(epoch)));
    Rng drop(derive_seed(cfg.seed, 200 + std::uint64_t(epoch)));
    std::vector<std::size_t> idx(items.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    order.shuffle(idx);
    // Equal-length chunks share a batch; no padding is needed.
    std::map<std::size_t, std::vector<std::size_t>> by_len;
    for (std::size_t i : idx) by_len[items[i].chunk.count].push_back(i);
    std::vector<std::vector<std::size_t>> batches;
    for (auto &[len, group] : by_len)
      for (std::size_t b = 0; b < group.size(); b += cfg.batch_size)
        batches.emplace_back(group.begin() + std::ptrdiff_t(b),
                             group.begin() + std::ptrdiff_t(std::min(group.size(), b + cfg.batch_size)));
    order.shuffle(batches);

    detail::LossMeans means;
    for (std::size_t bi = 0; bi < batches.size(); ++bi) {
      const auto &batch = batches[bi];
      const std::size_t count = items[batch.front()].chunk.count;
      const std::size_t len = model.chunk_input_samples(count);
      std::vector<double> input(batch.size() * len);
      const std::size_t rows = batch.size() * count;
      std::vector<bool> creak(rows), voiced(rows), pitch(rows), mask(rows),
          all(rows, true);
      for (std::size_t b = 0; b < batch.size(); ++b) {
        const Item &it = items[batch[b]];
        const Utterance &u = train_set[it.utt];
        model.fill_chunk_input(u.wave.samples, it.chunk,
                               std::span<double>(input).subspan(b * len, len));
        for (std::size_t k = 0; k < count; ++k) {
          const std::size_t f = it.chunk.begin + k, r = b * count + k;
          creak[r] = u.labels.creak[f];
          voiced[r] = u.labels.voiced[f];
          pitch[r] = u.labels.pitch[f];
          mask[r] = u.labels.loss_mask[f];
        }
      }
      nn::Tensor z = model.encode_chunks(
          nn::Tensor::from_data({batch.size(), 1, len}, std::move(input)), count);
      HeadLogits logits = model.classify_logits(z, true, &drop);

      detail::BatchLoss loss;
      loss.add(logits.creak, creak, mask, cfg.head_loss_weights[0], &LossBreakdown::creak);
      if (cfg.heads.voice)
        loss.add(logits.voice, voiced, mask, cfg.head_loss_weights[1], &LossBreakdown::voice);
      if (cfg.heads.pitch)
        loss.add(logits.pitch, pitch, all, cfg.head_loss_weights[2], &LossBreakdown::pitch);
      if (!loss.total.defined()) continue;  // nothing annotated in this batch
      detail::check_loss(loss.total, epoch, bi);
      loss.values.total = loss.total.item();

      detail::zero_grads(params);
      loss.total.backward();
      nn::adam_step(adam, params);
      means.add(loss.values);
      result.batches.push_back(loss.values);
    }

    EpochMetrics m;
    m.epoch = epoch;
    m.batches = means.batches;
    m.loss = means.mean();
    if (!val_set.empty()) m.val = evaluate_model(model, val_set).get(PhoneSubset::All);
    detail::emit(log, m);
    result.epochs.push_back(m);

    const bool better = val_set.empty() ||
                        !result.best_val_f1 || m.val->f1 > *result.best_val_f1;
    if (better) {
      result.checkpoint = model.to_checkpoint();
      result.best_epoch = epoch;
      if (m.val) result.best_val_f1 = m.val->f1;
    }
  }
  return result;
}

/// Frame embeddings with their labels (one entry per utterance).
struct EmbeddingItem {
  std::string id;
  EmbeddingSequence embeddings;
  FrameLabels labels;
};

/// Creak scores for a classifier on embedding items; the reference is the
/// frame creak labels mapped through the same 20 ms aggregation.
inline SubsetReport evaluate_embeddings(const CreakModel &model,
                                        const std::vector<EmbeddingItem> &data) {
  EvalCounts total;
  for (const auto &it : data) {
    const FramePredictions p = model.classify(it.embeddings);
    const double dur = double(it.embeddings.num_frames()) *
                       it.embeddings.frame_hop_ms / 1000.0;
    const auto grid = to_eval_grid(p.creak_final, p.frame_hop_ms, dur);
    const auto ref = to_eval_grid(it.labels.creak, it.labels.frame_hop_ms, dur);
    total += score_bruteforce(grid, ref);
  }
  return SubsetReport::from_counts(total);
}

/// Classifier-only training on precomputed embeddings. Frames are cut into
/// pieces of at most 100 and batched by piece; frame order inside a batch
/// does not matter to a per-frame classifier.
inline TrainResult train_on_embeddings(const std::vector<EmbeddingItem> &train_set,
                                       const std::vector<EmbeddingItem> &val_set,
                                       const TrainConfig &cfg,
                                       std::ostream *log = nullptr) {
  cfg.validate();
  if (train_set.empty()) fail(ErrorKind::EmptyDataset, "no training sequences");
  const std::size_t dim = train_set.front().embeddings.dim;
  const float hop = train_set.front().embeddings.frame_hop_ms;
  auto check = [&](const EmbeddingItem &it) {
    validate_embeddings(it.embeddings, it.id);
    if (it.embeddings.dim != dim || it.embeddings.frame_hop_ms != hop)
      fail(ErrorKind::MixedDims,
           it.id + ": dim " + std::to_string(it.embeddings.dim) + " / hop " +
               std::to_string(it.embeddings.frame_hop_ms) + " ms, expected dim " +
               std::to_string(dim) + " / hop " + std::to_string(hop) + " ms");
    it.labels.validate();
    if (it.labels.size() != it.embeddings.num_frames())
      fail(ErrorKind::GridMismatch, it.id + ": labels do not match the frame count");
  };
  for (const auto &it : train_set) check(it);
  for (const auto &it : val_set) check(it);

  ModelConfig mcfg = ModelConfig::embedding_classifier(int(dim), hop, cfg.heads, cfg.seed);
  mcfg.dropout = cfg.dropout;
  CreakModel model(mcfg);

  constexpr std::size_t kPiece = 100;
  struct Piece {
    std::size_t item, begin, count;
  };
  std::vector<Piece> pieces;
  for (std::size_t i = 0; i < train_set.size(); ++i)
    for (ChunkSpan c : chunk_layout(train_set[i].embeddings.num_frames(), kPiece))
      pieces.push_back({i, c.begin, c.count});

  std::vector<nn::Tensor> params = model.parameters();
  nn::AdamState adam;
  adam.lr = cfg.lr;
  TrainResult result;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    Rng order(derive_seed(cfg.seed, 100 + std::uint64_t(epoch)));
    Rng drop(derive_seed(cfg.seed, 200 + std::uint64_t(epoch)));
    std::vector<std::size_t> idx(pieces.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    order.shuffle(idx);

    detail::LossMeans means;
    for (std::size_t b = 0, bi = 0; b < idx.size(); b += cfg.batch_size, ++bi) {
      const std::size_t end = std::min(idx.size(), b + cfg.batch_size);
      std::vector<double> rows;
      std::vector<bool> creak, voiced, pitch, mask;
      for (std::size_t j = b; j < end; ++j) {
        const Piece &pc = pieces[idx[j]];
        const EmbeddingItem &it = train_set[pc.item];
        for (std::size_t k = pc.begin; k < pc.begin + pc.count; ++k) {
          const auto fr = it.embeddings.frame(k);
          rows.insert(rows.end(), fr.begin(), fr.end());
          creak.push_back(it.labels.creak[k]);
          voiced.push_back(it.labels.voiced[k]);
          pitch.push_back(it.labels.pitch[k]);
          mask.push_back(it.labels.loss_mask[k]);
        }
      }
      const std::size_t n = creak.size();
      HeadLogits logits = model.classify_logits(
          nn::Tensor::from_data({n, dim}, std::move(rows)), true, &drop);
      detail::BatchLoss loss;
      loss.add(logits.creak, creak, mask, cfg.head_loss_weights[0], &LossBreakdown::creak);
      if (cfg.heads.voice)
        loss.add(logits.voice, voiced, mask, cfg.head_loss_weights[1], &LossBreakdown::voice);
      if (cfg.heads.pitch)
        loss.add(logits.pitch, pitch, std::vector<bool>(n, true),
                 cfg.head_loss_weights[2], &LossBreakdown::pitch);
      if (!loss.total.defined()) continue;
      detail::check_loss(loss.total, epoch, bi);
      loss.values.total = loss.total.item();
      detail::zero_grads(params);
      loss.total.backward();
      nn::adam_step(adam, params);
      means.add(loss.values);
      result.batches.push_back(loss.values);
    }

    EpochMetrics m;
    m.epoch = epoch;
    m.batches = means.batches;
    m.loss = means.mean();
    if (!val_set.empty()) m.val = evaluate_embeddings(model, val_set);
    detail::emit(log, m);
    result.epochs.push_back(m);
    const bool better = val_set.empty() ||
                        !result.best_val_f1 || m.val->f1 > *result.best_val_f1;
    if (better) {
      result.checkpoint = model.to_checkpoint();
      result.best_epoch = epoch;
      if (m.val) result.best_val_f1 = m.val->f1;
    }
  }
  return result;
}

}  // namespace creaklab

#endif  // CREAKLAB_TRAIN_HPP_
