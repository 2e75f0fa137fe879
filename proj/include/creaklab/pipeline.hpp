// creaklab/pipeline.hpp

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

// Glue used by the command-line tool: corpus loading, frame/interval TSV
// streams, the heuristic baseline over whole files, and the end-to-end
// synth -> train -> eval driver.

#ifndef CREAKLAB_PIPELINE_HPP_
#define CREAKLAB_PIPELINE_HPP_

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "creaklab/baseline.hpp"
#include "creaklab/checkpoint.hpp"
#include "creaklab/eval.hpp"
#include "creaklab/labels.hpp"
#include "creaklab/model.hpp"
#include "creaklab/parallel.hpp"
#include "creaklab/pitch.hpp"
#include "creaklab/synth.hpp"
#include "creaklab/train.hpp"
#include "creaklab/wav.hpp"

namespace creaklab {

/// Reads and labels every utterance of one split.
inline std::vector<Utterance> load_split(const CorpusManifest &m,
                                         const std::string &dir,
                                         std::string_view split,
                                         const EncoderConfig &enc,
                                         int threads = 1) {
  const auto entries = m.split(split);
  std::vector<Utterance> out(entries.size());
  const std::filesystem::path base(dir);
  parallel_for(entries.size(), threads, [&](std::size_t i) {
    const CorpusEntry &e = *entries[i];
    out[i] = make_utterance(e.id, read_wav((base / e.wav).string()),
                            read_labels((base / e.labels).string()), enc);
  });
  return out;
}

inline std::string format_seconds(double t, int decimals = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, t);
  return buf;
}

inline constexpr std::string_view kFrameHeader =
    "time_s\tcreak_prob\tvoice_prob\tpitch_prob\tcreak_final";

/// Per-frame TSV; frame k is stamped at its centre (k + 0.5) * hop and
/// disabled heads print NA.
inline std::string format_frames(const FramePredictions &p) {
  std::string out(kFrameHeader);
  out += '\n';
  char buf[128];
  auto prob = [&](const std::vector<double> &v, std::size_t k) {
    if (v.empty()) return std::string("NA");
    std::snprintf(buf, sizeof buf, "%.6f", v[k]);
    return std::string(buf);
  };
  for (std::size_t k = 0; k < p.size(); ++k) {
    out += format_seconds((double(k) + 0.5) * p.frame_hop_ms / 1000.0);
    out += '\t' + prob(p.creak_prob, k) + '\t' + prob(p.voice_prob, k) + '\t' +
           prob(p.pitch_prob, k) + '\t' + (p.creak_final[k] ? "1" : "0") + '\n';
  }
  return out;
}

/// Run-length creak intervals of a prediction stream as a label tier.
inline IntervalTier prediction_intervals(const FramePredictions &p) {
  return heuristic_intervals(p.creak_final, p.frame_hop_ms / 1000.0, 0.0, "creak");
}

/// Boolean frame stream read back from a frame TSV.
struct FrameStream {
  double frame_hop_ms = 0.0;
  std::vector<bool> creak;

  double duration_s() const { return double(creak.size()) * frame_hop_ms / 1000.0; }
};

inline FrameStream parse_frames(std::string_view text, const std::string &source) {
  FrameStream fs;
  std::vector<double> times;
  std::size_t line_no = 0, pos = 0;
  bool header = false;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(line_no) + ": ";
    if (!header) {
      if (line != kFrameHeader)
        fail(ErrorKind::ParseError, where + "expected frame header '" +
                                        std::string(kFrameHeader) + "'");
      header = true;
      continue;
    }
    std::vector<std::string_view> f;
    std::size_t s = 0;
    while (true) {
      std::size_t tab = line.find('\t', s);
      f.push_back(line.substr(s, tab == std::string_view::npos ? tab : tab - s));
      if (tab == std::string_view::npos) break;
      s = tab + 1;
    }
    if (f.size() != 5) fail(ErrorKind::ParseError, where + "expected 5 fields");
    double t = 0.0;
    if (!detail::parse_seconds(f[0], t) || !std::isfinite(t) || t < 0.0)
      fail(ErrorKind::ParseError, where + "bad time '" + std::string(f[0]) + "'");
    if (!times.empty() && !(t > times.back()))
      fail(ErrorKind::ParseError, where + "times must increase");
    if (f[4] != "0" && f[4] != "1")
      fail(ErrorKind::ParseError, where + "creak_final must be 0 or 1");
    times.push_back(t);
    fs.creak.push_back(f[4] == "1");
  }
  if (!header) fail(ErrorKind::ParseError, source + ":1: missing frame header");
  if (fs.creak.empty()) fail(ErrorKind::EmptyPrediction, source + ": no frames");
  // Frames are centred, so a lone frame at t has hop 2t.
  fs.frame_hop_ms = 1000.0 * (times.size() > 1 ? times[1] - times[0] : 2.0 * times[0]);
  if (!(fs.frame_hop_ms > 0.0))
    fail(ErrorKind::ParseError, source + ": cannot infer the frame hop");
  return fs;
}

struct BaselineOptions {
  PitchOptions pitch = [] {
    PitchOptions p;
    p.time_step_s = 0.15;
    return p;
  }();
  ScanMode mode = ScanMode::StartToEnd;
  std::optional<double> from_s, to_s;  // analysis region
};

struct BaselineResult {
  PitchTrack track;
  std::vector<bool> creak;  // per pitch frame
  double offset_s = 0.0;    // start of the analysed region
  IntervalTier intervals;
};

inline BaselineResult run_baseline(const Waveform &w, const BaselineOptions &opt) {
  const double dur = w.duration_s();
  const double from = opt.from_s.value_or(0.0);
  const double to = opt.to_s.value_or(dur);
  if (!(from >= 0.0) || !(to > from) || !(to <= dur + 1e-9))
    fail(ErrorKind::InvalidRange, "region must satisfy 0 <= from < to <= duration");
  Waveform region;
  const auto a = static_cast<std::size_t>(std::llround(from * w.sample_rate_hz));
  const auto b = std::min(w.samples.size(),
                          static_cast<std::size_t>(std::llround(to * w.sample_rate_hz)));
  region.sample_rate_hz = w.sample_rate_hz;
  region.samples.assign(w.samples.begin() + std::ptrdiff_t(a),
                        w.samples.begin() + std::ptrdiff_t(b));
  BaselineResult r;
  r.offset_s = double(a) / w.sample_rate_hz;
  r.track = track_pitch(region, opt.pitch);
  r.creak = detect_creak_heuristic(r.track, opt.mode);
  r.intervals = heuristic_intervals(r.creak, opt.pitch.time_step_s, r.offset_s);
  return r;
}

inline std::string format_pitch(const PitchTrack &pt) {
  std::string out = "time_s\tf0_hz\tstrength\n";
  char buf[96];
  for (const auto &f : pt.frames) {
    if (f.f0_hz)
      std::snprintf(buf, sizeof buf, "%.6f\t%.3f\t%.4f\n", f.time_s, *f.f0_hz, f.strength);
    else
      std::snprintf(buf, sizeof buf, "%.6f\tNA\t%.4f\n", f.time_s, f.strength);
    out += buf;
  }
  return out;
}

/// Frames that break the voicing gate (creak_final without a confident
/// voice decision). Always zero for gated predictions.
inline std::size_t gate_violations(const FramePredictions &p, double gate_threshold) {
  if (p.voice_prob.empty()) return 0;
  std::size_t bad = 0;
  for (std::size_t k = 0; k < p.size(); ++k)
    if (p.creak_final[k] && !(p.voice_prob[k] >= gate_threshold)) ++bad;
  return bad;
}

/// Frame labels for external embeddings. Without an audio track the pitch
/// target comes from a "pitch" tier when present and from voicing otherwise.
inline EmbeddingItem make_embedding_item(std::string id, EmbeddingSequence emb,
                                         const std::vector<IntervalTier> &tiers) {
  const std::size_t k = emb.num_frames();
  const double hop = emb.frame_hop_ms;
  std::vector<bool> pitch(k, false);
  const IntervalTier *pt = find_tier(tiers, "pitch");
  if (pt == nullptr) pt = find_tier(tiers, "voice");
  for (std::size_t i = 0; i < k; ++i)
    pitch[i] = pt != nullptr && pt->find((double(i) + 0.5) * hop / 1000.0) != nullptr;
  EmbeddingItem item{std::move(id), std::move(emb), {}};
  item.labels = labels_from_intervals(tiers, hop, k, pitch);
  return item;
}

/// Reads a list file of "embeddings<TAB>labels" rows (header optional,
/// paths relative to the list file).
inline std::vector<EmbeddingItem> load_embedding_list(const std::string &path) {
  const Bytes bytes = read_file_bytes(path);
  const std::string text(bytes.begin(), bytes.end());
  const std::filesystem::path base = std::filesystem::path(path).parent_path();
  std::vector<EmbeddingItem> out;
  std::size_t pos = 0, line_no = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || (line_no == 1 && line == "embeddings\tlabels")) continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos)
      fail(ErrorKind::ParseError,
           path + ":" + std::to_string(line_no) + ": expected 'embeddings<TAB>labels'");
    const std::string emb = (base / line.substr(0, tab)).string();
    const std::string lab = (base / line.substr(tab + 1)).string();
    out.push_back(make_embedding_item(emb, read_embeddings(emb), read_labels(lab)));
  }
  return out;
}

struct ReproOptions {
  std::uint64_t seed = 7;
  std::size_t n = 60;
  TrainConfig train;  // seed and heads are taken from here
  std::string work_dir = "creaklab-repro";
  int threads = 1;
  std::ostream *log = nullptr;  // JSON-lines training log
};

/// synth -> train -> test-split evaluation, plus the heuristic baseline on
/// the same test split. The returned JSON holds no paths or timings, so it
/// is byte-stable per seed.
inline nlohmann::json run_repro(const ReproOptions &opt) {
  TrainConfig tc = opt.train;
  tc.seed = opt.seed;
  tc.validate();
  const std::filesystem::path work(opt.work_dir);
  const std::string corpus_dir = (work / "corpus").string();
  const CorpusManifest manifest = make_corpus(opt.n, opt.seed, corpus_dir, opt.threads);

  CreakModel model(ModelConfig::deepfry(tc.heads, derive_seed(opt.seed, 0x3D)));
  const EncoderConfig enc = model.encoder_config();
  const auto train_set = load_split(manifest, corpus_dir, "train", enc, opt.threads);
  const auto val_set = load_split(manifest, corpus_dir, "val", enc, opt.threads);
  const auto test_set = load_split(manifest, corpus_dir, "test", enc, opt.threads);

  TrainResult tr = train(model, train_set, val_set, tc, opt.log);
  const std::string ckpt_path = (work / "model.crkm").string();
  save_checkpoint(ckpt_path, tr.checkpoint);
  const CreakModel best = CreakModel::from_checkpoint(load_checkpoint(ckpt_path));

  EvalReport model_report, baseline_report;
  std::size_t frames = 0, violations = 0;
  BaselineOptions bopt;
  for (const auto &u : test_set) {
    const FramePredictions p = best.predict(u.wave);
    frames += p.size();
    violations += gate_violations(p, best.config().gate_threshold);
    const auto grid = to_eval_grid(p, u.wave.duration_s());
    const auto ref = rasterize_tier(find_tier(u.tiers, "creak"), grid.size());
    const IntervalTier *phones = find_tier(u.tiers, "phone");
    accumulate(model_report, grid, ref, phones);

    const BaselineResult b = run_baseline(u.wave, bopt);
    const auto bgrid = to_eval_grid(b.creak, bopt.pitch.time_step_s * 1000.0,
                                    u.wave.duration_s());
    accumulate(baseline_report, bgrid, ref, phones);
  }

  nlohmann::json history = nlohmann::json::array();
  for (const auto &e : tr.epochs) history.push_back(to_json(e));
  return {{"seed", opt.seed},
          {"n_utterances", opt.n},
          {"split_sizes",
           {{"train", train_set.size()}, {"val", val_set.size()}, {"test", test_set.size()}}},
          {"train_config", to_json(tc)},
          {"param_count", best.param_count()},
          {"best_epoch", tr.best_epoch},
          {"best_val_f1", tr.best_val_f1 ? nlohmann::json(*tr.best_val_f1) : nlohmann::json()},
          {"history", std::move(history)},
          {"test_frames", frames},
          {"gate_violations", violations},
          {"deepfry", to_json(model_report)},
          {"baseline", to_json(baseline_report)}};
}

}  // namespace creaklab

#endif  // CREAKLAB_PIPELINE_HPP_
