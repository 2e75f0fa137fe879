// tests/test_baseline.cpp

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

#include <vector>

#include "creaklab/creaklab.hpp"
#include "test_util.hpp"

using namespace creaklab;

namespace {
std::vector<bool> pattern(const std::string &s) {  // 'D' defined, 'U' undefined
  std::vector<bool> v;
  for (char c : s) v.push_back(c == 'D');
  return v;
}
std::vector<bool> flags(const std::string &s) {  // 'T' / 'F'
  std::vector<bool> v;
  for (char c : s) v.push_back(c == 'T');
  return v;
}
}  // namespace

TEST_CASE("baseline: start-to-end example", "[baseline]") {
  REQUIRE(detect_creak_heuristic(pattern("DDUDUDD"), ScanMode::StartToEnd) == flags("FFTTTTT"));
}

TEST_CASE("baseline: end-to-start example", "[baseline]") {
  REQUIRE(detect_creak_heuristic(pattern("DDDUU"), ScanMode::EndToStart) == flags("FFFTT"));
}

TEST_CASE("baseline: all defined is all modal", "[baseline]") {
  for (auto mode : {ScanMode::StartToEnd, ScanMode::EndToStart})
    REQUIRE(detect_creak_heuristic(pattern("DDDDDDD"), mode) == flags("FFFFFFF"));
}

TEST_CASE("baseline: trigger-free scans keep their standing assumption", "[baseline]") {
  // No undefined pair two apart: start-to-end stays modal.
  REQUIRE(detect_creak_heuristic(pattern("UDDUD"), ScanMode::StartToEnd) == flags("FFFFF"));
  // No defined pair two apart, but some frame defined.
  REQUIRE(detect_creak_heuristic(pattern("UDUUD"), ScanMode::EndToStart) == flags("FFFFF"));
  // Nothing defined at all: end-to-start stays creak.
  REQUIRE(detect_creak_heuristic(pattern("UUU"), ScanMode::EndToStart) == flags("TTT"));
  REQUIRE(detect_creak_heuristic(pattern(""), ScanMode::EndToStart).empty());
  REQUIRE(detect_creak_heuristic(pattern("U"), ScanMode::StartToEnd) == flags("F"));
}

TEST_CASE("baseline: exhaustive agreement with the rule simulation", "[baseline]") {
  for (int len = 0; len <= 12; ++len)
    for (int bits = 0; bits < (1 << len); ++bits) {
      std::vector<bool> d(len);
      for (int i = 0; i < len; ++i) d[i] = (bits >> i) & 1;
      for (bool s2e : {true, false}) {
        const auto got = detect_creak_heuristic(d, s2e ? ScanMode::StartToEnd : ScanMode::EndToStart);
        REQUIRE(got == testing::reference_scan(d, s2e));
        // Monotone in the scan direction.
        for (int i = 1; i < len; ++i) REQUIRE((!got[i - 1] || got[i]));
      }
    }
}

TEST_CASE("baseline: frame n+1 is ignored", "[baseline]") {
  auto a = pattern("DUUUDDD"), b = pattern("DUDUDDD");
  REQUIRE(detect_creak_heuristic(a, ScanMode::StartToEnd) ==
          detect_creak_heuristic(b, ScanMode::StartToEnd));
}

TEST_CASE("baseline intervals: run-length coding", "[baseline]") {
  const auto t = heuristic_intervals(flags("FTTF"), 0.15);
  REQUIRE(t.intervals.size() == 1);
  REQUIRE(t.intervals[0].start_s == Catch::Approx(0.15));
  REQUIRE(t.intervals[0].end_s == Catch::Approx(0.45));
  REQUIRE(t.intervals[0].label == "creak");
  REQUIRE(heuristic_intervals(flags("FFFF"), 0.15).intervals.empty());
  const auto all = heuristic_intervals(flags("TTT"), 0.15);
  REQUIRE(all.intervals.size() == 1);
  REQUIRE(all.intervals[0].start_s == 0.0);
  REQUIRE(all.intervals[0].end_s == Catch::Approx(0.45));
  const auto two = heuristic_intervals(flags("TFT"), 0.1, 1.0);
  REQUIRE(two.intervals.size() == 2);
  REQUIRE(two.intervals[1].start_s == Catch::Approx(1.2));
  REQUIRE_THROWS_AS(heuristic_intervals(flags("T"), 0.0), Error);
}

TEST_CASE("baseline: parse scan modes", "[baseline]") {
  REQUIRE(parse_scan_mode("start-to-end") == ScanMode::StartToEnd);
  REQUIRE(parse_scan_mode("end-to-start") == ScanMode::EndToStart);
  REQUIRE_THROWS_AS(parse_scan_mode("sideways"), Error);
}

TEST_CASE("baseline: modal then creak utterance", "[baseline][pipeline]") {
  SynthSpec spec;
  spec.seed = 4;
  spec.segments = {{SegmentKind::Modal, 1.2, 120, 0.005, 0.02},
                   {SegmentKind::Creak, 1.2, 30, 0.3, 0.3}};
  const Waveform w = synthesize(spec).wave;
  BaselineOptions opt;
  const BaselineResult r = run_baseline(w, opt);
  REQUIRE(r.track.time_step_s == 0.15);
  REQUIRE(r.creak.size() == r.track.size());
  // Onset lands somewhere in the creak half, never in the modal half.
  for (std::size_t i = 0; i < r.creak.size(); ++i)
    if (r.track.frames[i].time_s < 1.0) REQUIRE_FALSE(r.creak[i]);
  REQUIRE(r.creak.back());

  opt.from_s = 0.3;
  opt.to_s = 1.0;
  const BaselineResult part = run_baseline(w, opt);
  REQUIRE(part.offset_s == Catch::Approx(0.3));
  for (const auto &iv : part.intervals.intervals) REQUIRE(iv.start_s >= 0.3);
  opt.from_s = 1.5;
  opt.to_s = 1.0;
  REQUIRE_THROWS_AS(run_baseline(w, opt), Error);
}
