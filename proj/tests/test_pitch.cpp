// tests/test_pitch.cpp

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


#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "creaklab/creaklab.hpp"
#include "test_util.hpp"

using namespace creaklab;
using namespace creaklab::testing;

namespace {
double defined_fraction(const PitchTrack &t) {
  std::size_t d = 0;
  for (const auto &f : t.frames) d += f.defined() ? 1 : 0;
  return double(d) / double(t.size());
}
}  // namespace

TEST_CASE("pitch: 100 Hz sine within 1 Hz everywhere", "[pitch]") {
  const PitchTrack t = track_pitch(sine_wave(100.0, 1.0));
  REQUIRE(t.size() == 100);
  for (const auto &f : t.frames) {
    REQUIRE(f.defined());
    REQUIRE(std::abs(*f.f0_hz - 100.0) <= 1.0);
  }
}

TEST_CASE("pitch: zeros are undefined", "[pitch]") {
  Waveform w;
  w.samples.assign(16000, 0.0);
  for (const auto &f : track_pitch(w).frames) REQUIRE_FALSE(f.defined());
}

TEST_CASE("pitch: 40 Hz pulses below a 50 Hz floor are undefined", "[pitch]") {
  for (const auto &f : track_pitch(pulse_train(40.0, 1.0)).frames) REQUIRE_FALSE(f.defined());
}

TEST_CASE("pitch: periodic signals within 2 percent", "[pitch]") {
  for (double f0 : {60.0, 80.0, 100.0, 150.0, 220.0, 300.0}) {
    std::vector<Waveform> signals = {sine_wave(f0, 1.0), harmonic_wave(f0, 1.0)};
    // A one-sample impulse train is only periodic at f0 when the period is a
    // whole number of samples; 150 Hz pulses repeat exactly every 320.
    if (std::fmod(kSampleRate, f0) == 0.0) signals.push_back(pulse_train(f0, 1.0));
    for (const auto &w : signals) {
      const PitchTrack t = track_pitch(w);
      for (const auto &f : t.frames) {
        INFO("f0 " << f0 << " at " << f.time_s);
        REQUIRE(f.defined());
        REQUIRE(std::abs(*f.f0_hz - f0) <= 0.02 * f0);
      }
    }
  }
}

TEST_CASE("pitch: white noise is mostly undefined", "[pitch]") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    REQUIRE(defined_fraction(track_pitch(white_noise(1.0, seed))) <= 0.05);
  }
}

TEST_CASE("pitch: frame times and range invariants", "[pitch]") {
  PitchOptions opt;
  opt.time_step_s = 0.015;
  opt.floor_hz = 75;
  opt.ceiling_hz = 250;
  Waveform w = harmonic_wave(130.0, 0.7);
  const auto noise = white_noise(0.7, 5, 0.2);
  for (std::size_t i = 0; i < w.size(); ++i) w.samples[i] += noise.samples[i];
  const PitchTrack t = track_pitch(w, opt);
  for (std::size_t i = 0; i < t.size(); ++i) {
    REQUIRE(t.frames[i].time_s == Catch::Approx((i + 0.5) * 0.015).margin(1e-12));
    if (i > 0) REQUIRE(t.frames[i].time_s > t.frames[i - 1].time_s);
    if (t.frames[i].defined()) {
      REQUIRE(*t.frames[i].f0_hz >= 75.0);
      REQUIRE(*t.frames[i].f0_hz <= 250.0);
    }
    REQUIRE(t.frames[i].strength >= 0.0);
    REQUIRE(t.frames[i].strength <= 1.0);
  }
}

TEST_CASE("pitch: amplitude scaling changes nothing", "[pitch]") {
  SynthSpec spec;
  spec.seed = 12;
  spec.segments = {{SegmentKind::Modal, 0.4, 140, 0.005, 0.02},
                   {SegmentKind::Creak, 0.4, 35, 0.25, 0.3},
                   {SegmentKind::Unvoiced, 0.2},
                   {SegmentKind::Silence, 0.1}};
  const Waveform w = synthesize(spec).wave;
  for (double c : {0.01, 0.37, 10.0}) {
    Waveform s = w;
    for (double &x : s.samples) x *= c;
    const PitchTrack a = track_pitch(w), b = track_pitch(s);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      REQUIRE(a.frames[i].defined() == b.frames[i].defined());
      if (a.frames[i].defined())
        REQUIRE(std::abs(*a.frames[i].f0_hz - *b.frames[i].f0_hz) <= 1e-6 * *a.frames[i].f0_hz);
    }
  }
}

TEST_CASE("pitch: thread count does not change the track", "[pitch]") {
  const Waveform w = harmonic_wave(90.0, 1.0);
  PitchOptions one, four;
  four.threads = 4;
  const auto a = track_pitch(w, one), b = track_pitch(w, four);
  for (std::size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a.frames[i].f0_hz == b.frames[i].f0_hz);
    REQUIRE(a.frames[i].strength == b.frames[i].strength);
  }
}

TEST_CASE("pitch: argument errors", "[pitch]") {
  PitchOptions bad;
  bad.floor_hz = 400;
  bad.ceiling_hz = 300;
  REQUIRE_THROWS_AS(track_pitch(sine_wave(100, 1), bad), Error);
  Waveform tiny;
  tiny.samples.assign(100, 0.1);
  try {
    track_pitch(tiny);
    FAIL("no error");
  } catch (const Error &e) {
    REQUIRE(e.kind() == ErrorKind::TooShort);
  }
}

TEST_CASE("pitch mask: nearest-frame resampling", "[pitch][mask]") {
  PitchTrack all;
  all.time_step_s = 0.01;
  for (int i = 0; i < 100; ++i) all.frames.push_back({(i + 0.5) * 0.01, 100.0, 0.9});
  for (bool b : pitch_defined_mask(all, 5.0, 200)) REQUIRE(b);
  PitchTrack none = all;
  for (auto &f : none.frames) f.f0_hz.reset();
  for (bool b : pitch_defined_mask(none, 5.0, 200)) REQUIRE_FALSE(b);

  PitchTrack half = all;
  for (auto &f : half.frames)
    if (f.time_s >= 0.5) f.f0_hz.reset();
  const auto m = pitch_defined_mask(half, 5.0, 200);
  for (std::size_t k = 0; k < 200; ++k) REQUIRE(m[k] == (k < 100));

  // Brute-force nearest-neighbour oracle on an irregular pattern.
  Rng r(3);
  PitchTrack mixed;
  mixed.time_step_s = 0.15;
  for (int i = 0; i < 9; ++i)
    mixed.frames.push_back({(i + 0.5) * 0.15, r.uniform() < 0.5 ? std::optional<double>(100.0)
                                                                  : std::nullopt, 0.5});
  const auto mm = pitch_defined_mask(mixed, 5.0, 270);
  for (std::size_t k = 0; k < 270; ++k) {
    const double t = (k + 0.5) * 0.005;
    std::size_t best = 0;
    for (std::size_t j = 1; j < mixed.size(); ++j)
      if (std::abs(mixed.frames[j].time_s - t) < std::abs(mixed.frames[best].time_s - t)) best = j;
    REQUIRE(mm[k] == mixed.frames[best].defined());
  }
  REQUIRE_THROWS_AS(pitch_defined_mask(PitchTrack{}, 5.0, 10), Error);
}
