// creaklab/eval.hpp

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

// Frame-level creak scoring on a shared 20 ms grid.
//
// Window j spans [20j, 20(j+1)) ms. A prediction stream at any hop is mapped
// onto the grid by majority vote of the source frames whose centres fall in
// the window (ties count as creak; an empty window copies the nearest
// frame). Reference tiers are looked up at window midpoints. Scoring can be
// restricted to windows whose midpoint lies in a vowel or sonorant phone.

#ifndef CREAKLAB_EVAL_HPP_
#define CREAKLAB_EVAL_HPP_

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "creaklab/error.hpp"
#include "creaklab/labels.hpp"
#include "creaklab/model.hpp"

namespace creaklab {

inline constexpr double kEvalWindowS = 0.020;

enum class PhoneSubset { Vowels, Sonorants, All };

inline constexpr std::array<PhoneSubset, 3> kAllSubsets = {
    PhoneSubset::Vowels, PhoneSubset::Sonorants, PhoneSubset::All};

inline std::string_view to_string(PhoneSubset s) {
  switch (s) {
    case PhoneSubset::Vowels: return "vowels";
    case PhoneSubset::Sonorants: return "sonorants";
    case PhoneSubset::All: return "all";
  }
  return "all";
}

inline PhoneSubset parse_subset(std::string_view s) {
  if (s == "vowels") return PhoneSubset::Vowels;
  if (s == "sonorants") return PhoneSubset::Sonorants;
  if (s == "all") return PhoneSubset::All;
  fail(ErrorKind::InvalidInput,
       "unknown subset '" + std::string(s) + "' (vowels|sonorants|all)");
}

/// ARPAbet membership; stress digits and case are ignored.
inline bool is_vowel(std::string_view phone) {
  static constexpr std::string_view kVowels[] = {
      "AA", "AE", "AH", "AO", "AW", "AY", "EH", "ER",
      "EY", "IH", "IY", "OW", "OY", "UH", "UW"};
  std::string p;
  for (char c : phone)
    if (!std::isdigit(static_cast<unsigned char>(c)))
      p += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return std::find(std::begin(kVowels), std::end(kVowels), p) !=
         std::end(kVowels);
}

inline bool is_sonorant(std::string_view phone) {
  if (is_vowel(phone)) return true;
  static constexpr std::string_view kOther[] = {"L", "R", "W", "Y",
                                                "M", "N", "NG"};
  std::string p;
  for (char c : phone)
    if (!std::isdigit(static_cast<unsigned char>(c)))
      p += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return std::find(std::begin(kOther), std::end(kOther), p) != std::end(kOther);
}

inline std::size_t eval_grid_size(double duration_s) {
  if (!(duration_s > 0.0) || !std::isfinite(duration_s))
    fail(ErrorKind::InvalidInput, "utterance duration must be positive");
  return std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(duration_s / kEvalWindowS + 1e-9)));
}

/// Maps a boolean frame stream (frame k centred at (k + 0.5) * hop) onto
/// the 20 ms grid covering `duration_s`. A window takes the majority of the
/// frames centred inside it (ties count as positive); a window holding no
/// frame centre copies the nearest frame.
inline std::vector<bool> to_eval_grid(const std::vector<bool> &frames,
                                      double frame_hop_ms, double duration_s) {
  if (frames.empty()) fail(ErrorKind::EmptyPrediction, "no prediction frames");
  if (!(frame_hop_ms > 0.0))
    fail(ErrorKind::InvalidInput, "frame hop must be positive");
  const std::size_t n = eval_grid_size(duration_s);
  const double hop_s = frame_hop_ms / 1000.0;
  std::vector<int> votes(n, 0), counts(n, 0);
  for (std::size_t k = 0; k < frames.size(); ++k) {
    const double centre = (static_cast<double>(k) + 0.5) * hop_s;
    const double w = std::floor(centre / kEvalWindowS + 1e-9);
    if (w < 0.0 || w >= static_cast<double>(n)) continue;
    const auto j = static_cast<std::size_t>(w);
    ++counts[j];
    if (frames[k]) ++votes[j];
  }
  std::vector<bool> grid(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (counts[j] > 0) {
      grid[j] = 2 * votes[j] >= counts[j];
      continue;
    }
    const double mid = (static_cast<double>(j) + 0.5) * kEvalWindowS;
    // Frame k is nearest when its centre is within hop/2; an exact tie
    // goes to the later frame.
    const double k = std::floor(mid / hop_s + 1e-9);
    const auto idx = static_cast<std::size_t>(
        std::clamp(k, 0.0, static_cast<double>(frames.size() - 1)));
    grid[j] = frames[idx];
  }
  return grid;
}

inline std::vector<bool> to_eval_grid(const FramePredictions &pred,
                                      double duration_s) {
  return to_eval_grid(pred.creak_final, pred.frame_hop_ms, duration_s);
}

/// Window-midpoint lookup of a tier: true where the midpoint lies in any
/// interval.
inline std::vector<bool> rasterize_tier(const IntervalTier *tier,
                                        std::size_t windows) {
  std::vector<bool> grid(windows, false);
  if (tier == nullptr) return grid;
  for (std::size_t j = 0; j < windows; ++j)
    grid[j] = tier->find((static_cast<double>(j) + 0.5) * kEvalWindowS) != nullptr;
  return grid;
}

/// Windows counted for a subset. "all" ignores the phone tier.
inline std::vector<bool> subset_mask(const IntervalTier *phones,
                                     std::size_t windows, PhoneSubset subset) {
  std::vector<bool> mask(windows, subset == PhoneSubset::All);
  if (subset == PhoneSubset::All) return mask;
  if (phones == nullptr)
    fail(ErrorKind::InvalidInput, "subset '" + std::string(to_string(subset)) +
                                      "' needs a phone tier");
  for (std::size_t j = 0; j < windows; ++j) {
    const Interval *iv = phones->find((static_cast<double>(j) + 0.5) * kEvalWindowS);
    if (iv == nullptr) continue;
    mask[j] = subset == PhoneSubset::Vowels ? is_vowel(iv->label)
                                            : is_sonorant(iv->label);
  }
  return mask;
}

struct EvalCounts {
  std::uint64_t tp = 0, fp = 0, fn = 0;

  EvalCounts &operator+=(const EvalCounts &o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  friend bool operator==(const EvalCounts &, const EvalCounts &) = default;
};

/// Harmonic mean of precision and recall; 0 when both are 0.
inline double f1_from(double precision, double recall) {
  return precision + recall > 0.0
             ? 2.0 * precision * recall / (precision + recall)
             : 0.0;
}

struct SubsetReport {
  EvalCounts counts;
  double precision = 0.0, recall = 0.0, f1 = 0.0;

  static SubsetReport from_counts(const EvalCounts &c) {
    SubsetReport r;
    r.counts = c;
    r.precision = c.tp + c.fp ? double(c.tp) / double(c.tp + c.fp) : 0.0;
    r.recall = c.tp + c.fn ? double(c.tp) / double(c.tp + c.fn) : 0.0;
    r.f1 = f1_from(r.precision, r.recall);
    return r;
  }
};

/// Naive per-window counting; the differential oracle for score().
inline EvalCounts score_bruteforce(const std::vector<bool> &pred,
                                   const std::vector<bool> &ref) {
  if (pred.size() != ref.size())
    fail(ErrorKind::GridMismatch, "prediction has " + std::to_string(pred.size()) +
                                      " windows, reference " +
                                      std::to_string(ref.size()));
  EvalCounts c;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i] && ref[i]) ++c.tp;
    else if (pred[i] && !ref[i]) ++c.fp;
    else if (!pred[i] && ref[i]) ++c.fn;
  }
  return c;
}

namespace detail {

inline std::vector<std::uint64_t> pack_bits(const std::vector<bool> &v) {
  std::vector<std::uint64_t> words((v.size() + 63) / 64, 0);
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i]) words[i / 64] |= std::uint64_t{1} << (i % 64);
  return words;
}

}  // namespace detail

/// Counts over the windows selected by `subset`, via packed bit sets.
inline SubsetReport score(const std::vector<bool> &pred,
                          const std::vector<bool> &ref,
                          const IntervalTier *phones, PhoneSubset subset) {
  if (pred.size() != ref.size())
    fail(ErrorKind::GridMismatch, "prediction has " + std::to_string(pred.size()) +
                                      " windows, reference " +
                                      std::to_string(ref.size()));
  const auto p = detail::pack_bits(pred);
  const auto r = detail::pack_bits(ref);
  const auto m = detail::pack_bits(subset_mask(phones, pred.size(), subset));
  EvalCounts c;
  for (std::size_t w = 0; w < p.size(); ++w) {
    c.tp += static_cast<std::uint64_t>(std::popcount(p[w] & r[w] & m[w]));
    c.fp += static_cast<std::uint64_t>(std::popcount(p[w] & ~r[w] & m[w]));
    c.fn += static_cast<std::uint64_t>(std::popcount(~p[w] & r[w] & m[w]));
  }
  return SubsetReport::from_counts(c);
}

/// Per-subset counts accumulated over utterances.
struct EvalReport {
  std::array<EvalCounts, 3> counts{};  // indexed like kAllSubsets

  void add(PhoneSubset s, const EvalCounts &c) {
    counts[static_cast<std::size_t>(s)] += c;
  }
  SubsetReport get(PhoneSubset s) const {
    return SubsetReport::from_counts(counts[static_cast<std::size_t>(s)]);
  }
};

/// Scores one utterance into `report` for every subset the phone tier
/// supports ("all" always).
inline void accumulate(EvalReport &report, const std::vector<bool> &pred,
                       const std::vector<bool> &ref, const IntervalTier *phones) {
  for (PhoneSubset s : kAllSubsets) {
    if (s != PhoneSubset::All && phones == nullptr) continue;
    report.add(s, score(pred, ref, phones, s).counts);
  }
}

inline nlohmann::json to_json(const SubsetReport &r) {
  return {{"tp", r.counts.tp},
          {"fp", r.counts.fp},
          {"fn", r.counts.fn},
          {"precision", r.precision},
          {"recall", r.recall},
          {"f1", r.f1}};
}

inline nlohmann::json to_json(const EvalReport &report,
                              const std::vector<PhoneSubset> &subsets = {
                                  kAllSubsets.begin(), kAllSubsets.end()}) {
  nlohmann::json j = nlohmann::json::object();
  for (PhoneSubset s : subsets) j[std::string(to_string(s))] = to_json(report.get(s));
  return j;
}

}  // namespace creaklab

#endif  // CREAKLAB_EVAL_HPP_
