// tests/test_io_formats.cpp

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

#include <cstring>
#include <string>
#include <vector>

#include "creaklab/creaklab.hpp"
#include "test_util.hpp"

using namespace creaklab;
using creaklab::testing::TempDir;

namespace {

// Hand-built RIFF file, independent of encode_wav.
Bytes make_wav(std::uint16_t format, std::uint16_t channels, std::uint32_t rate,
               std::uint16_t bits, const std::vector<std::int16_t> &samples,
               bool extra_chunk = false) {
  Bytes b;
  auto put = [&](const void *p, std::size_t n) {
    const auto *c = static_cast<const std::uint8_t *>(p);
    b.insert(b.end(), c, c + n);
  };
  auto u32 = [&](std::uint32_t v) { for (int i = 0; i < 4; ++i) b.push_back(std::uint8_t(v >> (8 * i))); };
  auto u16 = [&](std::uint16_t v) { b.push_back(std::uint8_t(v)); b.push_back(std::uint8_t(v >> 8)); };
  const std::uint32_t data_bytes = std::uint32_t(samples.size() * 2);
  put("RIFF", 4);
  u32(36 + data_bytes + (extra_chunk ? 12 : 0));
  put("WAVE", 4);
  put("fmt ", 4);
  u32(16);
  u16(format);
  u16(channels);
  u32(rate);
  u32(rate * channels * bits / 8);
  u16(std::uint16_t(channels * bits / 8));
  u16(bits);
  if (extra_chunk) {
    put("LIST", 4);
    u32(3);  // odd size, padded
    put("abc\0", 4);
  }
  put("data", 4);
  u32(data_bytes);
  for (auto s : samples) u16(std::uint16_t(s));
  return b;
}

ErrorKind kind_of(const std::function<void()> &f) {
  try {
    f();
  } catch (const Error &e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::InvalidInput;
}

}  // namespace

TEST_CASE("wav: one second of zeros", "[io][wav]") {
  const Bytes b = make_wav(1, 1, 16000, 16, std::vector<std::int16_t>(16000, 0));
  const Waveform w = parse_wav(b, "zeros.wav");
  REQUIRE(w.size() == 16000);
  REQUIRE(w.sample_rate_hz == 16000);
  for (double s : w.samples) REQUIRE(s == 0.0);
}

TEST_CASE("wav: scaling divides by 32768", "[io][wav]") {
  const Bytes b = make_wav(1, 1, 16000, 16, {32767, -32768, 1});
  const Waveform w = parse_wav(b, "x.wav");
  REQUIRE(w.samples[0] == 32767.0 / 32768.0);
  REQUIRE(w.samples[1] == -1.0);
  REQUIRE(w.samples[2] == 1.0 / 32768.0);
}

TEST_CASE("wav: unknown chunks with odd size are skipped", "[io][wav]") {
  const Bytes b = make_wav(1, 1, 16000, 16, {5, 6, 7}, true);
  REQUIRE(parse_wav(b, "x.wav").size() == 3);
}

TEST_CASE("wav: rejects unsupported inputs", "[io][wav]") {
  std::vector<std::int16_t> s(100, 0);
  REQUIRE(kind_of([&] { parse_wav(make_wav(1, 1, 44100, 16, s), "a"); }) == ErrorKind::RateMismatch);
  REQUIRE(kind_of([&] { parse_wav(make_wav(1, 2, 16000, 16, s), "a"); }) == ErrorKind::UnsupportedFormat);
  REQUIRE(kind_of([&] { parse_wav(make_wav(1, 1, 16000, 8, s), "a"); }) == ErrorKind::UnsupportedFormat);
  REQUIRE(kind_of([&] { parse_wav(make_wav(3, 1, 16000, 16, s), "a"); }) == ErrorKind::UnsupportedFormat);
  Bytes bad = make_wav(1, 1, 16000, 16, s);
  std::memcpy(bad.data(), "RIFX", 4);
  REQUIRE(kind_of([&] { parse_wav(bad, "a"); }) == ErrorKind::NotWav);
  REQUIRE(kind_of([&] { parse_wav(Bytes{}, "a"); }) == ErrorKind::NotWav);
}

TEST_CASE("wav: 44.1 kHz resampled on request", "[io][wav]") {
  std::vector<std::int16_t> s(44100, 1000);
  const Waveform w = parse_wav(make_wav(1, 1, 44100, 16, s), "a", {true});
  REQUIRE(w.sample_rate_hz == 16000);
  REQUIRE(w.size() == 16000);
  for (double x : w.samples) REQUIRE(x == Catch::Approx(1000.0 / 32768.0));
}

TEST_CASE("wav: write/read roundtrip within one quantization step", "[io][wav]") {
  TempDir dir("wav");
  SynthSpec spec;
  spec.segments = {{SegmentKind::Modal, 0.3, 120.0, 0.0, 0.0},
                   {SegmentKind::Creak, 0.3, 40.0, 0.25, 0.2},
                   {SegmentKind::Unvoiced, 0.2}};
  spec.seed = 3;
  const Waveform w = synthesize(spec).wave;
  write_wav(dir.file("s.wav"), w);
  const Waveform back = read_wav(dir.file("s.wav"));
  REQUIRE(back.size() == w.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i)
    worst = std::max(worst, std::abs(back.samples[i] - w.samples[i]));
  REQUIRE(worst <= 1.0 / 32768.0);
}

TEST_CASE("wav: clamp and empty input", "[io][wav]") {
  REQUIRE(quantize_pcm16(1.0) == 32767);
  REQUIRE(quantize_pcm16(-1.0) == -32768);
  REQUIRE(quantize_pcm16(3.0) == 32767);
  REQUIRE(kind_of([] { encode_wav(Waveform{}); }) == ErrorKind::InvalidInput);
}

TEST_CASE("wav: missing file is an IoError naming the path", "[io][wav]") {
  try {
    read_wav("/nonexistent/dir/x.wav");
    FAIL("no error");
  } catch (const Error &e) {
    REQUIRE(e.kind() == ErrorKind::IoError);
    REQUIRE(std::string(e.what()).find("/nonexistent/dir/x.wav") != std::string::npos);
  }
}

TEST_CASE("labels: two intervals on one tier", "[io][labels]") {
  const auto tiers = parse_labels(
      "tier\tstart_s\tend_s\tlabel\ncreak\t0.30\t0.40\tc\ncreak\t0.10\t0.25\tc\n", "l.tsv");
  REQUIRE(tiers.size() == 1);
  REQUIRE(tiers[0].name == "creak");
  REQUIRE(tiers[0].intervals.size() == 2);
  REQUIRE(tiers[0].intervals[0].start_s == 0.10);
  REQUIRE(tiers[0].intervals[1].end_s == 0.40);
}

TEST_CASE("labels: overlap names the tier", "[io][labels]") {
  try {
    parse_labels("tier\tstart_s\tend_s\tlabel\ncreak\t0.10\t0.25\tc\ncreak\t0.20\t0.30\tc\n", "l.tsv");
    FAIL("no error");
  } catch (const Error &e) {
    REQUIRE(e.kind() == ErrorKind::OverlapError);
    REQUIRE(std::string(e.what()).find("creak") != std::string::npos);
  }
}

TEST_CASE("labels: header only gives no tiers", "[io][labels]") {
  REQUIRE(parse_labels("tier\tstart_s\tend_s\tlabel\n", "l").empty());
  REQUIRE(parse_labels("tier\tstart_s\tend_s\tlabel", "l").empty());
}

TEST_CASE("labels: parse errors carry the line number", "[io][labels]") {
  const char *bad[] = {
      "tier\tstart_s\tend_s\tlabel\ncreak\t0.1\tc\n",             // 3 columns
      "tier\tstart_s\tend_s\tlabel\ncreak\tx\t0.2\tc\n",          // bad number
      "tier\tstart_s\tend_s\tlabel\ncreak\t0.3\t0.2\tc\n",        // start >= end
      "tier\tstart_s\tend_s\tlabel\ncreak\t-0.1\t0.2\tc\n",       // negative
      "tier\tstart_s\tend_s\tlabel\ncreak\tnan\t0.2\tc\n",        // NaN
      "tier\tstart_s\tend_s\tlabel\ncreak\t0.1\t0.2\tc\textra\n",  // 5 columns
  };
  for (const char *text : bad) {
    try {
      parse_labels(text, "f.tsv");
      FAIL("no error for " << text);
    } catch (const Error &e) {
      REQUIRE(e.kind() == ErrorKind::ParseError);
      REQUIRE(std::string(e.what()).find("f.tsv:2:") != std::string::npos);
    }
  }
  REQUIRE(kind_of([] { parse_labels("", "f"); }) == ErrorKind::ParseError);
  REQUIRE(kind_of([] { parse_labels("a\tb\n", "f"); }) == ErrorKind::ParseError);
}

TEST_CASE("labels: format/parse roundtrip keeps tiers", "[io][labels]") {
  std::vector<IntervalTier> tiers = {
      {"creak", {{0.1, 0.25, "c"}, {0.5, 0.75, "c"}}},
      {"phone", {{0.0, 0.5, "AA1"}, {0.5, 1.0, "S"}}}};
  const auto back = parse_labels(format_labels(tiers), "rt");
  REQUIRE(back.size() == 2);
  for (std::size_t t = 0; t < 2; ++t) {
    REQUIRE(back[t].name == tiers[t].name);
    REQUIRE(back[t].intervals.size() == tiers[t].intervals.size());
    for (std::size_t i = 0; i < tiers[t].intervals.size(); ++i) {
      REQUIRE(back[t].intervals[i].start_s == Catch::Approx(tiers[t].intervals[i].start_s).margin(1e-6));
      REQUIRE(back[t].intervals[i].label == tiers[t].intervals[i].label);
    }
  }
  // Text is a fixed point after one pass.
  REQUIRE(format_labels(back) == format_labels(tiers));
}

TEST_CASE("labels: CRLF and BOM tolerated", "[io][labels]") {
  const auto tiers = parse_labels("\xEF\xBB\xBFtier\tstart_s\tend_s\tlabel\r\nv\t0\t1\tx\r\n", "l");
  REQUIRE(tiers.size() == 1);
  REQUIRE(tiers[0].intervals[0].label == "x");
}

TEST_CASE("embeddings: roundtrip is bit-exact", "[io][emb]") {
  EmbeddingSequence e;
  e.frame_hop_ms = 20.0f;
  e.dim = 2;
  e.values = {1, 2, 3, 4, 5, 6};
  const Bytes b = encode_embeddings(e);
  REQUIRE(b.size() == 20 + 6 * 4);
  const EmbeddingSequence back = parse_embeddings(b, "e");
  REQUIRE(back == e);
  REQUIRE(back.num_frames() == 3);
  REQUIRE(encode_embeddings(back) == b);

  TempDir dir("emb");
  write_embeddings(dir.file("e.crke"), e);
  REQUIRE(read_embeddings(dir.file("e.crke")) == e);
}

TEST_CASE("embeddings: error cases", "[io][emb]") {
  EmbeddingSequence e;
  e.dim = 2;
  e.values.assign(20, 0.5f);  // K = 10
  Bytes b = encode_embeddings(e);
  Bytes magic = b;
  std::memcpy(magic.data(), "XXXX", 4);
  REQUIRE(kind_of([&] { parse_embeddings(magic, "e"); }) == ErrorKind::BadMagic);
  Bytes truncated(b.begin(), b.begin() + 20 + 5 * 2 * 4);  // 5 of 10 frames
  REQUIRE(kind_of([&] { parse_embeddings(truncated, "e"); }) == ErrorKind::TruncatedFile);
  Bytes version = b;
  version[4] = 2;
  REQUIRE(kind_of([&] { parse_embeddings(version, "e"); }) == ErrorKind::VersionUnsupported);
  Bytes header_only(b.begin(), b.begin() + 10);
  REQUIRE(kind_of([&] { parse_embeddings(header_only, "e"); }) == ErrorKind::TruncatedFile);
}

TEST_CASE("checkpoint: save/load/forward is bitwise identical", "[io][ckpt]") {
  ModelConfig cfg = ModelConfig::embedding_classifier(8, 20.0, HeadSet{}, 11);
  cfg.trunk_width = 16;
  CreakModel m(cfg);
  TempDir dir("ckpt");
  const ModelCheckpoint ckpt = m.to_checkpoint();
  save_checkpoint(dir.file("m.crkm"), ckpt);
  const ModelCheckpoint back = load_checkpoint(dir.file("m.crkm"));
  REQUIRE(back.config == ckpt.config);
  REQUIRE(back.params == ckpt.params);
  REQUIRE(encode_checkpoint(back) == read_file_bytes(dir.file("m.crkm")));

  EmbeddingSequence z;
  z.frame_hop_ms = 20.0f;
  z.dim = 8;
  Rng r(5);
  for (int i = 0; i < 8 * 30; ++i) z.values.push_back(float(r.uniform(-1, 1)));
  const CreakModel a = CreakModel::from_checkpoint(ckpt);
  const CreakModel b = CreakModel::from_checkpoint(back);
  const auto pa = a.classify(z), pb = b.classify(z);
  REQUIRE(pa.creak_prob == pb.creak_prob);
  REQUIRE(pa.voice_prob == pb.voice_prob);
  REQUIRE(pa.pitch_prob == pb.pitch_prob);
}

TEST_CASE("checkpoint: error cases", "[io][ckpt]") {
  ModelConfig cfg = ModelConfig::embedding_classifier(4, 20.0, HeadSet{}, 1);
  cfg.trunk_width = 4;
  ModelCheckpoint ckpt = CreakModel(cfg).to_checkpoint();
  ModelCheckpoint short_ckpt = ckpt;
  short_ckpt.params.pop_back();
  REQUIRE(kind_of([&] { encode_checkpoint(short_ckpt); }) == ErrorKind::ParamCountMismatch);

  const Bytes good = encode_checkpoint(ckpt);
  Bytes v999 = good;
  v999[4] = 0xE7;
  v999[5] = 0x03;  // 999
  REQUIRE(kind_of([&] { parse_checkpoint(v999, "m"); }) == ErrorKind::VersionUnsupported);
  Bytes magic = good;
  magic[0] = 'X';
  REQUIRE(kind_of([&] { parse_checkpoint(magic, "m"); }) == ErrorKind::BadMagic);
  // Declared count one short of the config.
  const std::uint32_t json_len = good[8] | (good[9] << 8) | (good[10] << 16) | (good[11] << 24);
  Bytes count = good;
  count[12 + json_len] -= 1;
  REQUIRE(kind_of([&] { parse_checkpoint(count, "m"); }) == ErrorKind::ParamCountMismatch);
  Bytes cut(good.begin(), good.end() - 3);
  REQUIRE(kind_of([&] { parse_checkpoint(cut, "m"); }) == ErrorKind::TruncatedFile);
}

TEST_CASE("checkpoint: default DeepFry config roundtrips", "[io][ckpt]") {
  const CreakModel m(ModelConfig::deepfry(HeadSet{}, 3));
  const ModelCheckpoint c = m.to_checkpoint();
  const Bytes b = encode_checkpoint(c);
  const ModelCheckpoint back = parse_checkpoint(b, "m");
  REQUIRE(back.config == c.config);
  REQUIRE(back.params == c.params);
  REQUIRE(back.rng_seed() == 3);
}
