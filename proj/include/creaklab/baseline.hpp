// creaklab/baseline.hpp

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

// Heuristic creak onset/offset finder over a pitch track. Modal voice is
// assumed to have a numeric pitch value and creak an undefined one.
//
//  start-to-end: modal until frames n and n+2 are both undefined; creak from
//                n onwards.
//  end-to-start: creak (walking backwards) until frames n and n-2 are both
//                defined; modal from n down to the start.
//
// Frame n+1 (n-1) is never looked at. Lookups outside the track never
// trigger. Without a trigger, start-to-end is all modal, and end-to-start is
// all creak only when no frame is defined, otherwise all modal.

#ifndef CREAKLAB_BASELINE_HPP_
#define CREAKLAB_BASELINE_HPP_

#include <string>
#include <string_view>
#include <vector>

#include "creaklab/error.hpp"
#include "creaklab/labels.hpp"
#include "creaklab/pitch.hpp"

namespace creaklab {

enum class ScanMode { StartToEnd, EndToStart };

inline ScanMode parse_scan_mode(std::string_view s) {
  if (s == "start-to-end") return ScanMode::StartToEnd;
  if (s == "end-to-start") return ScanMode::EndToStart;
  fail(ErrorKind::InvalidInput, "unknown scan mode '" + std::string(s) +
                                    "' (expected start-to-end|end-to-start)");
}

/// Per-frame creak decision from a defined/undefined pitch mask.
inline std::vector<bool> detect_creak_heuristic(const std::vector<bool> &defined,
                                                ScanMode mode) {
  const std::size_t n = defined.size();
  std::vector<bool> creak(n, false);
  if (mode == ScanMode::StartToEnd) {
    for (std::size_t i = 0; i + 2 < n; ++i) {
      if (!defined[i] && !defined[i + 2]) {
        for (std::size_t j = i; j < n; ++j) creak[j] = true;
        return creak;
      }
    }
    return creak;
  }
  for (std::size_t i = n; i-- > 2;) {
    if (defined[i] && defined[i - 2]) {
      for (std::size_t j = i + 1; j < n; ++j) creak[j] = true;
      return creak;
    }
  }
  bool any_defined = false;
  for (bool d : defined) any_defined = any_defined || d;
  if (!any_defined) creak.assign(n, true);
  return creak;
}

inline std::vector<bool> detect_creak_heuristic(const PitchTrack &pt,
                                                ScanMode mode) {
  return detect_creak_heuristic(pt.defined_mask(), mode);
}

/// Maximal runs of true frames as "creak" intervals; frame i covers
/// [offset + i*step, offset + (i+1)*step).
inline IntervalTier heuristic_intervals(const std::vector<bool> &mask,
                                        double time_step_s,
                                        double offset_s = 0.0,
                                        std::string tier_name = "creak") {
  if (!(time_step_s > 0.0))
    fail(ErrorKind::InvalidInput, "time step must be positive");
  IntervalTier tier{std::move(tier_name), {}};
  std::size_t i = 0;
  while (i < mask.size()) {
    if (!mask[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < mask.size() && mask[j]) ++j;
    tier.intervals.push_back({offset_s + static_cast<double>(i) * time_step_s,
                              offset_s + static_cast<double>(j) * time_step_s,
                              "creak"});
    i = j;
  }
  return tier;
}

}  // namespace creaklab

#endif  // CREAKLAB_BASELINE_HPP_
