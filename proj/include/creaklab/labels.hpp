// creaklab/labels.hpp

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

// Interval annotations ("tiers") stored as a four-column TSV:
//
//   tier<TAB>start_s<TAB>end_s<TAB>label
//   creak	0.100000	0.250000	c
//
// The header row is mandatory. Rows of one tier may appear in any order but
// must not overlap once sorted.

#ifndef CREAKLAB_LABELS_HPP_
#define CREAKLAB_LABELS_HPP_

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include "creaklab/binary.hpp"
#include "creaklab/error.hpp"

namespace creaklab {

struct Interval {
  double start_s = 0.0;
  double end_s = 0.0;
  std::string label;

  bool contains(double t) const { return t >= start_s && t < end_s; }
};

struct IntervalTier {
  std::string name;
  std::vector<Interval> intervals;  // sorted, non-overlapping

  /// Interval whose half-open span [start, end) holds `t`, or nullptr.
  const Interval *find(double t) const {
    auto it = std::upper_bound(
        intervals.begin(), intervals.end(), t,
        [](double v, const Interval &iv) { return v < iv.start_s; });
    if (it == intervals.begin()) return nullptr;
    --it;
    return it->contains(t) ? &*it : nullptr;
  }

  double end_time() const {
    return intervals.empty() ? 0.0 : intervals.back().end_s;
  }
};

inline constexpr std::string_view kLabelHeader = "tier\tstart_s\tend_s\tlabel";

/// Throws OverlapError / InvalidInput when `tier` breaks the ordering rules.
inline void validate_tier(const IntervalTier &tier) {
  for (std::size_t i = 0; i < tier.intervals.size(); ++i) {
    const auto &iv = tier.intervals[i];
    if (!(std::isfinite(iv.start_s) && std::isfinite(iv.end_s)) ||
        !(iv.start_s < iv.end_s))
      fail(ErrorKind::InvalidInput, "tier '" + tier.name +
                                        "': interval " + std::to_string(i) +
                                        " has start >= end");
    if (i > 0 && iv.start_s < tier.intervals[i - 1].end_s)
      fail(ErrorKind::OverlapError,
           "tier '" + tier.name + "': intervals " + std::to_string(i - 1) +
               " and " + std::to_string(i) + " overlap");
  }
}

inline const IntervalTier *find_tier(const std::vector<IntervalTier> &tiers,
                                     std::string_view name) {
  for (const auto &t : tiers)
    if (t.name == name) return &t;
  return nullptr;
}

namespace detail {

inline bool parse_seconds(std::string_view field, double &out) {
  if (field.empty()) return false;
  const char *first = field.data();
  const char *last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

}  // namespace detail

inline std::vector<IntervalTier> parse_labels(std::string_view text,
                                              const std::string &source) {
  std::vector<IntervalTier> tiers;
  std::vector<std::vector<std::size_t>> line_of;  // parallel to intervals

  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool header_seen = false;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!header_seen) {
      if (line_no == 1 && line.size() >= 3 &&
          line.substr(0, 3) == "\xEF\xBB\xBF")
        line.remove_prefix(3);
      if (line != kLabelHeader)
        fail(ErrorKind::ParseError,
             source + ":" + std::to_string(line_no) +
                 ": expected header 'tier<TAB>start_s<TAB>end_s<TAB>label'");
      header_seen = true;
      if (eol == text.size()) break;
      continue;
    }
    if (line.empty()) {
      if (eol == text.size()) break;
      continue;
    }

    std::string_view fields[4];
    std::size_t n_fields = 0, start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
      if (i == line.size() || line[i] == '\t') {
        if (n_fields == 4) {
          n_fields = 5;
          break;
        }
        fields[n_fields++] = line.substr(start, i - start);
        start = i + 1;
      }
    }
    const std::string where = source + ":" + std::to_string(line_no) + ": ";
    if (line.find('\r') != std::string_view::npos)
      fail(ErrorKind::ParseError, where + "stray carriage return");
    if (n_fields != 4)
      fail(ErrorKind::ParseError, where + "expected 4 tab-separated columns");
    if (fields[0].empty()) fail(ErrorKind::ParseError, where + "empty tier name");
    Interval iv;
    if (!detail::parse_seconds(fields[1], iv.start_s))
      fail(ErrorKind::ParseError, where + "bad start time '" +
                                      std::string(fields[1]) + "'");
    if (!detail::parse_seconds(fields[2], iv.end_s))
      fail(ErrorKind::ParseError, where + "bad end time '" +
                                      std::string(fields[2]) + "'");
    if (iv.start_s < 0.0)
      fail(ErrorKind::ParseError, where + "negative start time");
    if (!(iv.start_s < iv.end_s))
      fail(ErrorKind::ParseError, where + "start_s must be < end_s");
    iv.label = std::string(fields[3]);

    std::size_t t = 0;
    while (t < tiers.size() && tiers[t].name != fields[0]) ++t;
    if (t == tiers.size()) {
      tiers.push_back({std::string(fields[0]), {}});
      line_of.emplace_back();
    }
    tiers[t].intervals.push_back(std::move(iv));
    line_of[t].push_back(line_no);
    if (eol == text.size()) break;
  }
  if (!header_seen)
    fail(ErrorKind::ParseError, source + ":1: missing header row");

  for (std::size_t t = 0; t < tiers.size(); ++t) {
    auto &ivs = tiers[t].intervals;
    std::vector<std::size_t> order(ivs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
      return ivs[a].start_s < ivs[b].start_s;
    });
    std::vector<Interval> sorted;
    sorted.reserve(ivs.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
      if (i > 0 && ivs[order[i]].start_s < ivs[order[i - 1]].end_s)
        fail(ErrorKind::OverlapError,
             source + ": tier '" + tiers[t].name + "' intervals on lines " +
                 std::to_string(line_of[t][order[i - 1]]) + " and " +
                 std::to_string(line_of[t][order[i]]) + " overlap");
      sorted.push_back(ivs[order[i]]);
    }
    ivs = std::move(sorted);
  }
  return tiers;
}

inline std::vector<IntervalTier> read_labels(const std::string &path) {
  Bytes data = read_file_bytes(path);
  return parse_labels(
      std::string_view(reinterpret_cast<const char *>(data.data()),
                       data.size()),
      path);
}

namespace detail {

/// Six decimals when that reads back exactly, else the shortest exact
/// fixed-point form, so a written file always parses to the same times.
inline std::string format_label_time(double t) {
  char buf[400];
  std::snprintf(buf, sizeof buf, "%.6f", t);
  double back = 0.0;
  if (parse_seconds(buf, back) && back == t) return buf;
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, t, std::chars_format::fixed);
  if (ec != std::errc()) fail(ErrorKind::InvalidInput, "cannot format time");
  return std::string(buf, end);
}

}  // namespace detail

inline std::string format_labels(const std::vector<IntervalTier> &tiers) {
  std::string out(kLabelHeader);
  out += '\n';
  auto plain = [](const std::string &field) {
    return field.find_first_of("\t\r\n") == std::string::npos;
  };
  for (const auto &tier : tiers) {
    validate_tier(tier);
    if (tier.name.empty() || !plain(tier.name))
      fail(ErrorKind::InvalidInput, "tier name must be non-empty without tabs or newlines");
    for (const auto &iv : tier.intervals) {
      if (!plain(iv.label))
        fail(ErrorKind::InvalidInput, "label in tier '" + tier.name +
                                          "' contains a tab or newline");
      out += tier.name;
      out += '\t' + detail::format_label_time(iv.start_s);
      out += '\t' + detail::format_label_time(iv.end_s);
      out += '\t' + iv.label + '\n';
    }
  }
  return out;
}

inline void write_labels(const std::string &path,
                         const std::vector<IntervalTier> &tiers) {
  write_file_text(path, format_labels(tiers));
}

}  // namespace creaklab

#endif  // CREAKLAB_LABELS_HPP_
