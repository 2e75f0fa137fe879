// creaklab/synth.hpp

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

// Source-filter toy speech with exact labels.
//
// Voiced segments are a train of exponentially decaying glottal pulses
// passed through two cascaded resonators (700 Hz and 1200 Hz, 130 Hz
// bandwidth). Creak is the same source at a very low rate with per-period
// jitter and shimmer. Unvoiced segments are first-differenced white noise
// that skips the filter; silence is zeros.

#ifndef CREAKLAB_SYNTH_HPP_
#define CREAKLAB_SYNTH_HPP_

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "creaklab/binary.hpp"
#include "creaklab/error.hpp"
#include "creaklab/labels.hpp"
#include "creaklab/parallel.hpp"
#include "creaklab/rng.hpp"
#include "creaklab/wav.hpp"

namespace creaklab {

enum class SegmentKind { Modal, Creak, Unvoiced, Silence };

inline std::string_view to_string(SegmentKind k) {
  switch (k) {
    case SegmentKind::Modal: return "modal";
    case SegmentKind::Creak: return "creak";
    case SegmentKind::Unvoiced: return "unvoiced";
    case SegmentKind::Silence: return "silence";
  }
  return "silence";
}

inline SegmentKind parse_segment_kind(std::string_view s) {
  if (s == "modal") return SegmentKind::Modal;
  if (s == "creak") return SegmentKind::Creak;
  if (s == "unvoiced") return SegmentKind::Unvoiced;
  if (s == "silence") return SegmentKind::Silence;
  fail(ErrorKind::BadSpec, "unknown segment kind '" + std::string(s) + "'");
}

struct Segment {
  SegmentKind kind = SegmentKind::Modal;
  double duration_s = 0.0;
  double f0_hz = 0.0;  // voiced kinds only
  double jitter = 0.0;
  double shimmer = 0.0;
};

struct SynthSpec {
  std::vector<Segment> segments;
  std::uint64_t seed = 0;

  double duration_s() const {
    double d = 0.0;
    for (const auto &s : segments) d += s.duration_s;
    return d;
  }

  void validate() const {
    if (segments.empty()) fail(ErrorKind::BadSpec, "synth layout has no segments");
    for (std::size_t i = 0; i < segments.size(); ++i) {
      const Segment &s = segments[i];
      const std::string at = "segment " + std::to_string(i) + ": ";
      if (!(s.duration_s > 0.0) || !std::isfinite(s.duration_s))
        fail(ErrorKind::BadSpec, at + "duration must be positive");
      if (!(s.jitter >= 0.0 && s.jitter < 1.0) ||
          !(s.shimmer >= 0.0 && s.shimmer < 1.0))
        fail(ErrorKind::BadSpec, at + "jitter and shimmer must be in [0, 1)");
      if (s.kind == SegmentKind::Modal && !(s.f0_hz >= 80.0 && s.f0_hz <= 300.0))
        fail(ErrorKind::BadSpec, at + "modal f0 must be in [80, 300] Hz");
      if (s.kind == SegmentKind::Creak) {
        if (!(s.f0_hz >= 20.0 && s.f0_hz <= 60.0))
          fail(ErrorKind::BadSpec, at + "creak f0 must be in [20, 60] Hz");
        if (s.jitter < 0.15)
          fail(ErrorKind::BadSpec, at + "creak jitter must be >= 0.15");
      }
    }
    if (!(duration_s() <= 30.0))
      fail(ErrorKind::BadSpec, "total duration exceeds 30 s");
  }
};

struct SynthResult {
  Waveform wave;
  std::vector<IntervalTier> tiers;  // creak, voice, phone
};

namespace detail {

/// Two-pole resonator with unit gain at DC.
class Resonator {
 public:
  Resonator(double freq_hz, double bw_hz, double sr) {
    const double r = std::exp(-std::numbers::pi * bw_hz / sr);
    c_ = -r * r;
    b_ = 2.0 * r * std::cos(2.0 * std::numbers::pi * freq_hz / sr);
    a_ = 1.0 - b_ - c_;
  }
  double operator()(double x) {
    const double y = a_ * x + b_ * y1_ + c_ * y2_;
    y2_ = y1_;
    y1_ = y;
    return y;
  }

 private:
  double a_, b_, c_;
  double y1_ = 0.0, y2_ = 0.0;
};

inline constexpr double kPulseDecayS = 0.002;

}  // namespace detail

/// Renders a spec. Segment boundaries are rounded to whole samples and the
/// tiers use those exact times.
inline SynthResult synthesize(const SynthSpec &spec) {
  spec.validate();
  const double sr = kSampleRate;
  std::vector<std::size_t> bounds{0};
  double t = 0.0;
  for (const auto &s : spec.segments) {
    t += s.duration_s;
    bounds.push_back(static_cast<std::size_t>(std::llround(t * sr)));
  }
  const std::size_t total = bounds.back();
  if (total == 0) fail(ErrorKind::BadSpec, "synth layout renders to zero samples");

  Rng rng(spec.seed);
  std::vector<double> source(total, 0.0), noise(total, 0.0);
  const auto pulse_len = static_cast<std::size_t>(5.0 * detail::kPulseDecayS * sr);
  for (std::size_t i = 0; i < spec.segments.size(); ++i) {
    const Segment &s = spec.segments[i];
    const std::size_t b = bounds[i], e = bounds[i + 1];
    if (s.kind == SegmentKind::Unvoiced) {
      double prev = rng.uniform(-1.0, 1.0);
      for (std::size_t n = b; n < e; ++n) {
        const double cur = rng.uniform(-1.0, 1.0);
        noise[n] = 0.5 * (cur - prev);
        prev = cur;
      }
      continue;
    }
    if (s.kind == SegmentKind::Silence) continue;
    double pos = static_cast<double>(b);
    while (pos < static_cast<double>(e)) {
      const double amp = 1.0 + rng.uniform(-s.shimmer, s.shimmer);
      const auto p = static_cast<std::size_t>(std::llround(pos));
      for (std::size_t k = 0; k < pulse_len && p + k < e; ++k)
        source[p + k] += amp * std::exp(-static_cast<double>(k) / (detail::kPulseDecayS * sr));
      const double period = sr / s.f0_hz * (1.0 + rng.uniform(-s.jitter, s.jitter));
      pos += period;
    }
  }

  detail::Resonator f1(700.0, 130.0, sr), f2(1200.0, 130.0, sr);
  std::vector<double> out(total);
  for (std::size_t n = 0; n < total; ++n) out[n] = f2(f1(source[n]));
  // Resonator ringing must not leak past a voiced segment: unvoiced spans
  // carry only their noise and silence stays exactly zero. Voiced spans
  // lose the pulse train's DC offset.
  for (std::size_t i = 0; i < spec.segments.size(); ++i) {
    if (bounds[i] == bounds[i + 1]) continue;
    if (spec.segments[i].kind == SegmentKind::Unvoiced ||
        spec.segments[i].kind == SegmentKind::Silence) {
      for (std::size_t n = bounds[i]; n < bounds[i + 1]; ++n) out[n] = noise[n];
      continue;
    }
    double mean = 0.0;
    for (std::size_t n = bounds[i]; n < bounds[i + 1]; ++n) mean += out[n];
    mean /= static_cast<double>(bounds[i + 1] - bounds[i]);
    for (std::size_t n = bounds[i]; n < bounds[i + 1]; ++n) out[n] -= mean;
  }
  double peak = 0.0;
  for (double v : out) peak = std::max(peak, std::abs(v));
  if (peak > 0.0)
    for (double &v : out) v *= 0.5 / peak;

  SynthResult r;
  r.wave.samples = std::move(out);
  IntervalTier creak{"creak", {}}, voice{"voice", {}}, phone{"phone", {}};
  for (std::size_t i = 0; i < spec.segments.size(); ++i) {
    const double s0 = static_cast<double>(bounds[i]) / sr;
    const double s1 = static_cast<double>(bounds[i + 1]) / sr;
    if (bounds[i] == bounds[i + 1]) continue;
    const SegmentKind k = spec.segments[i].kind;
    const bool voiced = k == SegmentKind::Modal || k == SegmentKind::Creak;
    if (k == SegmentKind::Creak) creak.intervals.push_back({s0, s1, "c"});
    if (voiced) {
      // Adjacent voiced segments form one voicing interval.
      if (!voice.intervals.empty() && voice.intervals.back().end_s == s0)
        voice.intervals.back().end_s = s1;
      else
        voice.intervals.push_back({s0, s1, "v"});
    }
    phone.intervals.push_back({s0, s1, voiced ? "AA" : k == SegmentKind::Unvoiced ? "S" : "SIL"});
  }
  r.tiers = {std::move(creak), std::move(voice), std::move(phone)};
  return r;
}

/// Segment placement in a rendered utterance.
struct SegmentRecord {
  Segment segment;
  double start_s = 0.0, end_s = 0.0;
};

struct CorpusEntry {
  std::string id;
  std::string wav;     // relative to the manifest directory
  std::string labels;
  std::string split;   // train | val | test
  bool has_creak = false;
  std::uint64_t seed = 0;
  std::vector<SegmentRecord> segments;
};

struct CorpusManifest {
  std::uint64_t seed = 0;
  std::vector<CorpusEntry> utterances;

  std::vector<const CorpusEntry *> split(std::string_view name) const {
    std::vector<const CorpusEntry *> out;
    for (const auto &u : utterances)
      if (u.split == name) out.push_back(&u);
    return out;
  }
};

/// Random layout of 2..6 segments of 0.2..0.5 s (multiples of 5 ms). A
/// creak utterance gets exactly one creak segment.
inline SynthSpec random_utterance_spec(std::uint64_t seed, bool with_creak) {
  Rng rng(seed);
  SynthSpec spec;
  spec.seed = derive_seed(seed, 1);
  const std::size_t n = 2 + static_cast<std::size_t>(rng.below(5));
  const std::size_t creak_at =
      with_creak ? static_cast<std::size_t>(rng.below(n)) : n;
  bool any_modal = false;
  for (std::size_t i = 0; i < n; ++i) {
    Segment s;
    s.duration_s = 0.2 + 0.005 * static_cast<double>(rng.below(61));
    if (i == creak_at) {
      s.kind = SegmentKind::Creak;
      s.f0_hz = rng.uniform(25.0, 45.0);
      s.jitter = rng.uniform(0.2, 0.3);
      s.shimmer = rng.uniform(0.2, 0.4);
    } else {
      const double u = rng.uniform();
      s.kind = u < 0.6 ? SegmentKind::Modal
               : u < 0.85 ? SegmentKind::Unvoiced
                          : SegmentKind::Silence;
      // Draw the voicing parameters regardless so the layout stream does
      // not depend on the kind.
      const double f0 = rng.uniform(80.0, 300.0);
      const double jit = rng.uniform(0.0, 0.01);
      const double shim = rng.uniform(0.0, 0.05);
      if (s.kind == SegmentKind::Modal) {
        s.f0_hz = f0;
        s.jitter = jit;
        s.shimmer = shim;
        any_modal = true;
      }
    }
    spec.segments.push_back(s);
  }
  // Every utterance carries some modal voice.
  if (!any_modal)
    for (auto &s : spec.segments)
      if (s.kind != SegmentKind::Creak) {
        s.kind = SegmentKind::Modal;
        s.f0_hz = 80.0 + 220.0 * rng.uniform();
        s.jitter = 0.0;
        s.shimmer = 0.0;
        break;
      }
  return spec;
}

inline nlohmann::json to_json(const CorpusManifest &m) {
  nlohmann::json utts = nlohmann::json::array();
  nlohmann::json splits = {{"train", nlohmann::json::array()},
                           {"val", nlohmann::json::array()},
                           {"test", nlohmann::json::array()}};
  for (const auto &u : m.utterances) {
    nlohmann::json segs = nlohmann::json::array();
    for (const auto &r : u.segments)
      segs.push_back({{"kind", to_string(r.segment.kind)},
                      {"start_s", r.start_s},
                      {"end_s", r.end_s},
                      {"f0_hz", r.segment.f0_hz},
                      {"jitter", r.segment.jitter},
                      {"shimmer", r.segment.shimmer}});
    utts.push_back({{"id", u.id},
                    {"wav", u.wav},
                    {"labels", u.labels},
                    {"split", u.split},
                    {"has_creak", u.has_creak},
                    {"seed", u.seed},
                    {"segments", std::move(segs)}});
    splits[u.split].push_back(u.id);
  }
  return {{"format", "creaklab-corpus"},
          {"version", 1},
          {"seed", m.seed},
          {"n", m.utterances.size()},
          {"splits", std::move(splits)},
          {"utterances", std::move(utts)}};
}

inline CorpusManifest manifest_from_json(const nlohmann::json &j,
                                         const std::string &source) {
  CorpusManifest m;
  try {
    if (j.at("format").get<std::string>() != "creaklab-corpus")
      fail(ErrorKind::ParseError, source + ": not a corpus manifest");
    m.seed = j.at("seed").get<std::uint64_t>();
    for (const auto &u : j.at("utterances")) {
      CorpusEntry e;
      e.id = u.at("id").get<std::string>();
      e.wav = u.at("wav").get<std::string>();
      e.labels = u.at("labels").get<std::string>();
      e.split = u.at("split").get<std::string>();
      e.has_creak = u.at("has_creak").get<bool>();
      e.seed = u.at("seed").get<std::uint64_t>();
      for (const auto &s : u.at("segments")) {
        SegmentRecord r;
        r.segment.kind = parse_segment_kind(s.at("kind").get<std::string>());
        r.start_s = s.at("start_s").get<double>();
        r.end_s = s.at("end_s").get<double>();
        r.segment.duration_s = r.end_s - r.start_s;
        r.segment.f0_hz = s.at("f0_hz").get<double>();
        r.segment.jitter = s.at("jitter").get<double>();
        r.segment.shimmer = s.at("shimmer").get<double>();
        e.segments.push_back(r);
      }
      m.utterances.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception &e) {
    fail(ErrorKind::ParseError, source + ": " + e.what());
  }
  return m;
}

inline CorpusManifest read_manifest(const std::string &path) {
  const Bytes bytes = read_file_bytes(path);
  nlohmann::json j = nlohmann::json::parse(bytes.begin(), bytes.end(), nullptr, false);
  if (j.is_discarded()) fail(ErrorKind::ParseError, path + ": invalid JSON");
  return manifest_from_json(j, path);
}

/// Directory holding a manifest, for resolving its relative paths.
inline std::string manifest_dir(const std::string &manifest_path) {
  auto p = std::filesystem::path(manifest_path).parent_path();
  return p.empty() ? std::string(".") : p.string();
}

/// Plans a corpus without rendering it: per-utterance seeds, creak
/// assignment (60 % of utterances, rounded) and a 70/15/15 split stratified
/// by whether an utterance contains creak.
inline CorpusManifest plan_corpus(std::size_t n, std::uint64_t seed) {
  if (n < 1) fail(ErrorKind::InvalidInput, "corpus needs at least one utterance");
  CorpusManifest m;
  m.seed = seed;
  Rng plan(derive_seed(seed, 0xC0));
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  plan.shuffle(order);
  const auto n_creak = static_cast<std::size_t>(std::llround(0.6 * double(n)));
  std::vector<bool> creak(n, false);
  for (std::size_t i = 0; i < n_creak; ++i) creak[order[i]] = true;

  m.utterances.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "utt%03zu", i);
    CorpusEntry &e = m.utterances[i];
    e.id = id;
    e.wav = e.id + ".wav";
    e.labels = e.id + ".tsv";
    e.has_creak = creak[i];
    e.seed = derive_seed(seed, 0x1000 + i);
  }
  for (bool stratum : {true, false}) {
    std::vector<std::size_t> ids;
    for (std::size_t i = 0; i < n; ++i)
      if (creak[i] == stratum) ids.push_back(i);
    plan.shuffle(ids);
    const auto n_train = static_cast<std::size_t>(std::llround(0.70 * double(ids.size())));
    const auto n_val = static_cast<std::size_t>(std::llround(0.15 * double(ids.size())));
    for (std::size_t j = 0; j < ids.size(); ++j)
      m.utterances[ids[j]].split = j < n_train ? "train"
                                   : j < n_train + n_val ? "val"
                                                         : "test";
  }
  return m;
}

/// Renders one planned utterance and fills in its segment records.
inline SynthResult render_entry(CorpusEntry &e) {
  const SynthSpec spec = random_utterance_spec(e.seed, e.has_creak);
  SynthResult r = synthesize(spec);
  e.segments.clear();
  double t = 0.0;
  for (const auto &s : spec.segments) {
    const double a = std::llround(t * kSampleRate) / double(kSampleRate);
    t += s.duration_s;
    const double b = std::llround(t * kSampleRate) / double(kSampleRate);
    e.segments.push_back({s, a, b});
  }
  return r;
}

/// Writes uttNNN.wav / uttNNN.tsv pairs and manifest.json into out_dir.
/// Output bytes depend only on (n, seed), not on the thread count.
inline CorpusManifest make_corpus(std::size_t n, std::uint64_t seed,
                                  const std::string &out_dir, int threads = 1) {
  CorpusManifest m = plan_corpus(n, seed);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) fail(ErrorKind::IoError, out_dir + ": " + ec.message());
  const std::filesystem::path dir(out_dir);
  parallel_for(n, threads, [&](std::size_t i) {
    CorpusEntry &e = m.utterances[i];
    SynthResult r = render_entry(e);
    write_wav((dir / e.wav).string(), r.wave);
    write_labels((dir / e.labels).string(), r.tiers);
  });
  write_file_text((dir / "manifest.json").string(), to_json(m).dump(2) + "\n");
  return m;
}

}  // namespace creaklab

#endif  // CREAKLAB_SYNTH_HPP_
