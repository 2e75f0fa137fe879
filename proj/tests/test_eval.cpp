// tests/test_eval.cpp

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
std::vector<bool> flags(const std::string &s) {
  std::vector<bool> v;
  for (char c : s) v.push_back(c == 'T');
  return v;
}
std::vector<bool> random_bits(Rng &r, std::size_t n, double p = 0.5) {
  std::vector<bool> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = r.uniform() < p;
  return v;
}
}  // namespace

TEST_CASE("grid: majority vote with positive ties", "[eval][grid]") {
  REQUIRE(to_eval_grid(flags("TTTF"), 5.0, 0.02) == flags("T"));
  REQUIRE(to_eval_grid(flags("TTFF"), 5.0, 0.02) == flags("T"));
  REQUIRE(to_eval_grid(flags("TFFF"), 5.0, 0.02) == flags("F"));
  REQUIRE(to_eval_grid(flags("TTFFFFFT"), 5.0, 0.04) == flags("TF"));
}

TEST_CASE("grid: 20 ms input is the identity and idempotent", "[eval][grid]") {
  Rng r(2);
  for (int i = 0; i < 50; ++i) {
    const std::size_t n = 1 + r.below(80);
    const auto v = random_bits(r, n);
    const auto g = to_eval_grid(v, 20.0, n * 0.02);
    REQUIRE(g == v);
    REQUIRE(to_eval_grid(g, 20.0, n * 0.02) == g);
  }
}

TEST_CASE("grid: agrees with a literal window count", "[eval][grid]") {
  Rng r(5);
  for (double hop : {5.0, 10.0, 8.0, 15.0, 25.0, 40.0}) {
    for (int trial = 0; trial < 30; ++trial) {
      const double dur = 0.1 + r.uniform() * 1.5;
      const auto frames_n = std::size_t(dur * 1000 / hop);
      if (frames_n == 0) continue;
      const auto v = random_bits(r, frames_n);
      const auto g = to_eval_grid(v, hop, dur);
      const std::size_t n = std::max<std::size_t>(1, std::size_t(std::floor(dur / 0.02 + 1e-9)));
      REQUIRE(g.size() == n);
      for (std::size_t j = 0; j < n; ++j) {
        int votes = 0, count = 0;
        std::size_t nearest = 0;
        double best = 1e9;
        for (std::size_t k = 0; k < v.size(); ++k) {
          const double c = (k + 0.5) * hop / 1000.0;
          if (c >= j * 0.02 - 1e-12 && c < (j + 1) * 0.02 - 1e-12) {
            ++count;
            votes += v[k];
          }
          const double d = std::abs(c - (j + 0.5) * 0.02);
          if (d <= best + 1e-12) {  // ties go to the later frame
            best = d;
            nearest = k;
          }
        }
        const bool want = count ? 2 * votes >= count : bool(v[nearest]);
        INFO("hop " << hop << " window " << j);
        REQUIRE(g[j] == want);
      }
    }
  }
}

TEST_CASE("grid: errors", "[eval][grid]") {
  REQUIRE_THROWS_AS(to_eval_grid(std::vector<bool>{}, 5.0, 1.0), Error);
  REQUIRE_THROWS_AS(to_eval_grid(flags("T"), 5.0, 0.0), Error);
  REQUIRE(eval_grid_size(0.01) == 1);
  REQUIRE(eval_grid_size(1.0) == 50);
  REQUIRE(eval_grid_size(0.999) == 49);
}

TEST_CASE("score: known precision, recall, F1 triples", "[eval][f1]") {
  REQUIRE(std::abs(100 * f1_from(0.6743, 0.7627) - 71.57) <= 0.01);
  REQUIRE(std::abs(100 * f1_from(0.3293, 0.6060) - 42.67) <= 0.01);
  // Same through counts: tp/(tp+fp) = .6743, tp/(tp+fn) = .7627.
  EvalCounts c{6743, 3257, 2098};
  const auto r = SubsetReport::from_counts(c);
  REQUIRE(r.precision == Catch::Approx(0.6743));
  REQUIRE(std::abs(100 * r.recall - 76.27) <= 0.01);
  REQUIRE(std::abs(100 * r.f1 - 71.57) <= 0.01);
}

TEST_CASE("score: perfect and degenerate cases", "[eval][f1]") {
  const auto v = flags("TFTTFFTFTT");
  const auto r = score(v, v, nullptr, PhoneSubset::All);
  REQUIRE(r.precision == 1.0);
  REQUIRE(r.recall == 1.0);
  REQUIRE(r.f1 == 1.0);
  const auto none = score(flags("FFF"), flags("FFF"), nullptr, PhoneSubset::All);
  REQUIRE(none.f1 == 0.0);
  REQUIRE(none.precision == 0.0);
  REQUIRE_THROWS_AS(score(flags("TF"), flags("T"), nullptr, PhoneSubset::All), Error);
  REQUIRE_THROWS_AS(score(flags("T"), flags("T"), nullptr, PhoneSubset::Vowels), Error);
}

TEST_CASE("bruteforce examples", "[eval][f1]") {
  REQUIRE(score_bruteforce(flags("TF"), flags("TT")) == EvalCounts{1, 0, 1});
  REQUIRE(score_bruteforce(flags("FFFFF"), flags("TTTTT")) == EvalCounts{0, 0, 5});
  try {
    score_bruteforce(flags("T"), flags("TT"));
    FAIL("no error");
  } catch (const Error &e) {
    REQUIRE(e.kind() == ErrorKind::GridMismatch);
  }
}

TEST_CASE("score equals the brute-force count", "[eval][f1]") {
  Rng r(77);
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = 1 + r.below(300);
    const auto p = random_bits(r, n, r.uniform()), q = random_bits(r, n, r.uniform());
    REQUIRE(score(p, q, nullptr, PhoneSubset::All).counts == score_bruteforce(p, q));
  }
}

TEST_CASE("F1 lies between precision and recall", "[eval][f1]") {
  Rng r(3);
  for (int i = 0; i < 2000; ++i) {
    const double p = r.uniform(1e-6, 1), q = r.uniform(1e-6, 1);
    const double f = f1_from(p, q);
    REQUIRE(f >= std::min(p, q) - 1e-15);
    REQUIRE(f <= std::max(p, q) + 1e-15);
    REQUIRE(f1_from(p, p) == Catch::Approx(p).epsilon(1e-15));
  }
}

TEST_CASE("phone subsets", "[eval][subset]") {
  REQUIRE(is_vowel("AA1"));
  REQUIRE(is_vowel("uw"));
  REQUIRE_FALSE(is_vowel("S"));
  REQUIRE_FALSE(is_vowel("NG"));
  REQUIRE(is_sonorant("NG"));
  REQUIRE(is_sonorant("ER0"));
  REQUIRE_FALSE(is_sonorant("SIL"));
  REQUIRE_FALSE(is_sonorant("T"));
  REQUIRE(parse_subset("sonorants") == PhoneSubset::Sonorants);
  REQUIRE_THROWS_AS(parse_subset("glides"), Error);
}

TEST_CASE("subset nesting and filtered counts", "[eval][subset]") {
  static const char *phones[] = {"AA1", "S", "M", "IY0", "T", "L", "SIL", "NG", "ER1", "K"};
  Rng r(8);
  for (int trial = 0; trial < 200; ++trial) {
    IntervalTier tier{"phone", {}};
    double t = 0.0;
    while (t < 1.0) {
      const double d = 0.02 + r.uniform() * 0.1;
      tier.intervals.push_back({t, t + d, phones[r.below(10)]});
      t += d;
    }
    const std::size_t n = 50;
    const auto p = random_bits(r, n), q = random_bits(r, n);
    EvalReport rep;
    accumulate(rep, p, q, &tier);
    const auto v = rep.get(PhoneSubset::Vowels).counts, s = rep.get(PhoneSubset::Sonorants).counts,
               a = rep.get(PhoneSubset::All).counts;
    REQUIRE(v.tp + v.fn <= s.tp + s.fn);
    REQUIRE(s.tp + s.fn <= a.tp + a.fn);
    // Oracle: filter windows by midpoint phone, then brute-force count.
    std::vector<bool> pv, qv;
    for (std::size_t j = 0; j < n; ++j) {
      const Interval *iv = tier.find((j + 0.5) * 0.02);
      if (iv && is_vowel(iv->label)) {
        pv.push_back(p[j]);
        qv.push_back(q[j]);
      }
    }
    REQUIRE(v == score_bruteforce(pv, qv));
  }
}

TEST_CASE("reference rasterization at window midpoints", "[eval]") {
  IntervalTier t{"creak", {{0.015, 0.05, "c"}, {0.09, 0.1, "c"}}};
  // Midpoints 0.01, 0.03, 0.05, 0.07, 0.09.
  REQUIRE(rasterize_tier(&t, 5) == flags("FTFFT"));
  REQUIRE(rasterize_tier(nullptr, 3) == flags("FFF"));
}

TEST_CASE("report JSON shape", "[eval]") {
  EvalReport rep;
  rep.add(PhoneSubset::All, {3, 1, 2});
  const auto j = to_json(rep, {PhoneSubset::All});
  REQUIRE(j.size() == 1);
  REQUIRE(j["all"]["tp"] == 3);
  REQUIRE(j["all"]["precision"].get<double>() == Catch::Approx(0.75));
  REQUIRE(j["all"]["recall"].get<double>() == Catch::Approx(0.6));
  REQUIRE(j["all"]["f1"].get<double>() == Catch::Approx(2 * 0.75 * 0.6 / 1.35));
}
