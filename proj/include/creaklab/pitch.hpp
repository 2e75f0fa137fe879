// creaklab/pitch.hpp

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

// Short-term autocorrelation pitch tracker in the style of Praat's "To Pitch
// (ac)": each frame's windowed autocorrelation is divided by the window's own
// autocorrelation, and the strongest lag peak inside the pitch range decides
// both f0 and voicing. There is no path search across frames; a frame is
// either defined (numeric f0) or undefined.

#ifndef CREAKLAB_PITCH_HPP_
#define CREAKLAB_PITCH_HPP_

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "creaklab/error.hpp"
#include "creaklab/parallel.hpp"
#include "creaklab/wav.hpp"

namespace creaklab {

struct PitchFrame {
  double time_s = 0.0;
  std::optional<double> f0_hz;  // nullopt == undefined
  double strength = 0.0;        // normalized autocorrelation peak, [0, 1]

  bool defined() const { return f0_hz.has_value(); }
};

struct PitchTrack {
  double time_step_s = 0.0;
  double floor_hz = 0.0;
  double ceiling_hz = 0.0;
  std::vector<PitchFrame> frames;  // frame i centred at (i + 0.5) * step

  std::size_t size() const { return frames.size(); }

  std::vector<bool> defined_mask() const {
    std::vector<bool> m(frames.size());
    for (std::size_t i = 0; i < frames.size(); ++i) m[i] = frames[i].defined();
    return m;
  }
};

struct PitchOptions {
  double time_step_s = 0.01;
  double floor_hz = 50.0;
  double ceiling_hz = 350.0;
  double voicing_threshold = 0.45;
  /// Frames whose peak amplitude is below this fraction of the signal's
  /// global peak are undefined without analysis.
  double silence_threshold = 0.03;
  /// Per-octave bonus for shorter lags when picking the best peak; stops
  /// near-equal peaks at multiples of the period from winning.
  double octave_cost = 0.01;
  int threads = 1;
};

namespace detail {

inline std::vector<double> hann_window(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t j = 0; j < n; ++j)
    w[j] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi *
                                (static_cast<double>(j) + 0.5) /
                                static_cast<double>(n));
  return w;
}

inline std::vector<double> autocorrelation(const std::vector<double> &x,
                                           std::size_t max_lag) {
  std::vector<double> r(max_lag + 1, 0.0);
  const std::size_t n = x.size();
  for (std::size_t lag = 0; lag <= max_lag && lag < n; ++lag) {
    double acc = 0.0;
    for (std::size_t t = 0; t + lag < n; ++t) acc += x[t] * x[t + lag];
    r[lag] = acc;
  }
  return r;
}

}  // namespace detail

inline PitchTrack track_pitch(const Waveform &w, const PitchOptions &opt = {}) {
  const double sr = static_cast<double>(w.sample_rate_hz);
  if (!(opt.floor_hz > 0.0) || !(opt.floor_hz < opt.ceiling_hz) ||
      !(opt.ceiling_hz < sr / 2.0))
    fail(ErrorKind::InvalidRange,
         "pitch range must satisfy 0 < floor < ceiling < sample_rate/2 (got " +
             std::to_string(opt.floor_hz) + ".." +
             std::to_string(opt.ceiling_hz) + " Hz)");
  if (!(opt.time_step_s > 0.0) || !std::isfinite(opt.time_step_s))
    fail(ErrorKind::InvalidRange, "time step must be positive");
  if (!(opt.voicing_threshold >= 0.0 && opt.voicing_threshold <= 1.0))
    fail(ErrorKind::InvalidRange, "voicing threshold must be in [0, 1]");

  const auto window_len =
      static_cast<std::size_t>(std::lround(3.0 * sr / opt.floor_hz));
  if (w.samples.size() < window_len)
    fail(ErrorKind::TooShort,
         "waveform has " + std::to_string(w.samples.size()) +
             " samples, one analysis window needs " +
             std::to_string(window_len));

  const auto min_lag = static_cast<std::size_t>(std::floor(sr / opt.ceiling_hz));
  const auto max_lag = static_cast<std::size_t>(std::ceil(sr / opt.floor_hz));
  // One extra lag on each side for the local-maximum test and interpolation.
  const std::size_t lag_hi = std::min(max_lag + 1, window_len - 1);

  const std::vector<double> window = detail::hann_window(window_len);
  std::vector<double> window_ac = detail::autocorrelation(window, lag_hi);
  const double window_ac0 = window_ac[0];
  for (double &v : window_ac) v /= window_ac0;

  double global_peak = 0.0;
  for (double s : w.samples) global_peak = std::max(global_peak, std::abs(s));

  const double duration = w.duration_s();
  const auto n_frames = static_cast<std::size_t>(
      std::max(1.0, std::floor(duration / opt.time_step_s + 1e-9)));

  PitchTrack track;
  track.time_step_s = opt.time_step_s;
  track.floor_hz = opt.floor_hz;
  track.ceiling_hz = opt.ceiling_hz;
  track.frames.resize(n_frames);

  parallel_for(n_frames, opt.threads, [&](std::size_t i) {
    PitchFrame &frame = track.frames[i];
    frame.time_s = (static_cast<double>(i) + 0.5) * opt.time_step_s;
    // Window centred on the frame time, shifted inward at the edges.
    long long start = std::llround(frame.time_s * sr) -
                      static_cast<long long>(window_len / 2);
    start = std::clamp<long long>(
        start, 0, static_cast<long long>(w.samples.size() - window_len));

    double local_peak = 0.0, mean = 0.0;
    for (std::size_t j = 0; j < window_len; ++j) {
      double s = w.samples[static_cast<std::size_t>(start) + j];
      local_peak = std::max(local_peak, std::abs(s));
      mean += s;
    }
    if (global_peak == 0.0 || local_peak < opt.silence_threshold * global_peak)
      return;
    mean /= static_cast<double>(window_len);

    std::vector<double> seg(window_len);
    for (std::size_t j = 0; j < window_len; ++j)
      seg[j] = (w.samples[static_cast<std::size_t>(start) + j] - mean) *
               window[j];
    std::vector<double> r = detail::autocorrelation(seg, lag_hi);
    if (!(r[0] > 0.0)) return;
    const double r0 = r[0];
    for (std::size_t lag = 0; lag <= lag_hi; ++lag)
      r[lag] = (r[lag] / r0) / window_ac[lag];

    double best_score = -1e300, best_lag = 0.0, best_value = 0.0;
    for (std::size_t lag = std::max<std::size_t>(min_lag, 1);
         lag <= max_lag && lag + 1 <= lag_hi; ++lag) {
      if (!(r[lag] >= r[lag - 1] && r[lag] >= r[lag + 1])) continue;
      const double left = r[lag - 1], mid = r[lag], right = r[lag + 1];
      const double curvature = left - 2.0 * mid + right;
      double delta = 0.0, value = mid;
      if (curvature < 0.0) {
        delta = 0.5 * (left - right) / curvature;
        value = mid - 0.25 * (left - right) * delta;
      }
      const double refined = static_cast<double>(lag) + delta;
      const double score =
          value - opt.octave_cost * std::log2(opt.floor_hz * refined / sr);
      if (score > best_score) {
        best_score = score;
        best_lag = refined;
        best_value = value;
      }
    }
    if (best_lag <= 0.0) return;
    frame.strength = std::clamp(best_value, 0.0, 1.0);
    const double f0 = sr / best_lag;
    if (best_value >= opt.voicing_threshold && f0 >= opt.floor_hz &&
        f0 <= opt.ceiling_hz)
      frame.f0_hz = f0;
  });
  return track;
}

/// Resamples a pitch track onto a model frame grid (frame k centred at
/// (k + 0.5) * hop) by nearest frame time.
inline std::vector<bool> pitch_defined_mask(const PitchTrack &pt,
                                            double frame_hop_ms,
                                            std::size_t num_frames) {
  if (pt.frames.empty()) fail(ErrorKind::EmptyTrack, "pitch track is empty");
  if (num_frames == 0)
    fail(ErrorKind::InvalidInput, "num_frames must be >= 1");
  if (!(frame_hop_ms > 0.0))
    fail(ErrorKind::InvalidInput, "frame hop must be positive");
  std::vector<bool> mask(num_frames);
  std::size_t j = 0;
  for (std::size_t k = 0; k < num_frames; ++k) {
    const double t = (static_cast<double>(k) + 0.5) * frame_hop_ms / 1000.0;
    // Track times increase, so the nearest index only moves forward.
    while (j + 1 < pt.frames.size() &&
           std::abs(pt.frames[j + 1].time_s - t) <
               std::abs(pt.frames[j].time_s - t))
      ++j;
    mask[k] = pt.frames[j].defined();
  }
  return mask;
}

}  // namespace creaklab

#endif  // CREAKLAB_PITCH_HPP_
