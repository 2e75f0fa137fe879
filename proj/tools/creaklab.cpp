// tools/creaklab.cpp

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

// Command-line front end. Exit codes: 0 success, 1 usage error,
// 2 data or format error, 3 runtime failure (diverged loss and the like).

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "creaklab/creaklab.hpp"

namespace {

using namespace creaklab;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitRuntime = 3;

struct Globals {
  std::uint64_t seed = 7;
  int threads = default_threads();
  bool quiet = false;
};

/// Writes to a file, or stdout for "-" / empty.
void emit(const std::string &path, const std::string &text) {
  if (path.empty() || path == "-") {
    std::cout << text << std::flush;
    return;
  }
  write_file_text(path, text);
}

void note(const Globals &g, const std::string &msg) {
  if (!g.quiet) std::cerr << msg << '\n';
}

int exit_code_for(const Error &e) {
  switch (e.kind()) {
    case ErrorKind::DivergedLoss:
    case ErrorKind::NonFinite:
      return kExitRuntime;
    default:
      return kExitData;
  }
}

/// Opens the JSON-lines training log; empty path means stderr unless quiet.
struct LogSink {
  std::ofstream file;
  std::ostream *out = nullptr;

  LogSink(const std::string &path, const Globals &g) {
    if (!path.empty()) {
      file.open(path, std::ios::binary);
      if (!file) fail(ErrorKind::IoError, "cannot open '" + path + "' for writing");
      out = &file;
    } else if (!g.quiet) {
      out = &std::cerr;
    }
  }
};

}  // namespace

int main(int argc, char **argv) {
  Globals g;
  CLI::App app{"creaklab: creaky-voice detection toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--seed", g.seed, "Master random seed")->capture_default_str();
  app.add_option("--threads", g.threads,
                 "Worker threads for per-file work (default: CREAKLAB_THREADS or 1)")
      ->check(CLI::PositiveNumber);
  app.add_flag("--quiet", g.quiet, "Suppress progress output");

  // synth
  std::size_t synth_n = 60;
  std::string synth_out;
  auto *synth = app.add_subcommand("synth", "Generate a labelled synthetic corpus");
  synth->add_option("--n", synth_n, "Number of utterances")->capture_default_str()
      ->check(CLI::PositiveNumber);
  synth->add_option("--out", synth_out, "Output directory")->required();

  // pitch
  std::string pitch_wav, pitch_out = "-";
  PitchOptions popt;
  bool pitch_resample = false;
  auto *pitch = app.add_subcommand("pitch", "Track pitch; TSV time_s, f0_hz (or NA), strength");
  pitch->add_option("--wav", pitch_wav, "Input WAV (PCM16 mono)")->required();
  pitch->add_option("--time-step", popt.time_step_s, "Frame step in seconds")->capture_default_str();
  pitch->add_option("--floor", popt.floor_hz, "Pitch floor in Hz")->capture_default_str();
  pitch->add_option("--ceiling", popt.ceiling_hz, "Pitch ceiling in Hz")->capture_default_str();
  pitch->add_option("--voicing-threshold", popt.voicing_threshold,
                    "Minimum peak strength for a defined frame")->capture_default_str();
  pitch->add_flag("--resample", pitch_resample, "Resample non-16 kHz input");
  pitch->add_option("--out", pitch_out, "Output TSV ('-' for stdout)");

  // baseline
  std::string base_wav, base_out = "-", base_mode = "start-to-end";
  BaselineOptions bopt;
  std::optional<double> base_from, base_to;
  bool base_resample = false;
  auto *baseline = app.add_subcommand("baseline", "Heuristic creak finder over a pitch track");
  baseline->add_option("--wav", base_wav, "Input WAV")->required();
  baseline->add_option("--mode", base_mode, "Scan direction")
      ->check(CLI::IsMember({"start-to-end", "end-to-start"}))->capture_default_str();
  baseline->add_option("--time-step", bopt.pitch.time_step_s, "Pitch step in seconds")
      ->capture_default_str();
  baseline->add_option("--floor", bopt.pitch.floor_hz, "Pitch floor in Hz")->capture_default_str();
  baseline->add_option("--ceiling", bopt.pitch.ceiling_hz, "Pitch ceiling in Hz")
      ->capture_default_str();
  baseline->add_option("--from-s", base_from, "Region start in seconds");
  baseline->add_option("--to-s", base_to, "Region end in seconds");
  baseline->add_flag("--resample", base_resample, "Resample non-16 kHz input");
  baseline->add_option("--out", base_out, "Output label TSV ('-' for stdout)");

  // train
  std::string train_manifest, train_out, train_log, train_config, train_heads = "creak,voice,pitch";
  TrainConfig tcfg;
  auto *train_cmd = app.add_subcommand("train", "Train the waveform model on a synthetic corpus manifest");
  train_cmd->add_option("--manifest", train_manifest, "Corpus manifest.json")->required();
  train_cmd->add_option("--out", train_out, "Output checkpoint (.crkm)")->required();
  train_cmd->add_option("--config", train_config, "JSON file with training settings");
  train_cmd->add_option("--epochs", tcfg.epochs, "Epochs")->capture_default_str();
  train_cmd->add_option("--lr", tcfg.lr, "Adam learning rate")->capture_default_str();
  train_cmd->add_option("--batch-size", tcfg.batch_size, "Chunks per batch")->capture_default_str();
  train_cmd->add_option("--dropout", tcfg.dropout, "Dropout rate")->capture_default_str();
  train_cmd->add_option("--heads", train_heads, "Enabled heads, e.g. creak,voice")
      ->capture_default_str();
  train_cmd->add_option("--log", train_log, "JSON-lines metrics log (default stderr)");

  // train-emb
  std::string emb_train, emb_val, emb_out, emb_log, emb_heads = "creak,voice,pitch";
  TrainConfig ecfg = TrainConfig::embedding_defaults();
  auto *train_emb = app.add_subcommand("train-emb", "Train the classifier on precomputed embeddings");
  train_emb->add_option("--train", emb_train,
                        "List file of 'embeddings<TAB>labels' rows")->required();
  train_emb->add_option("--val", emb_val, "Validation list file");
  train_emb->add_option("--out", emb_out, "Output checkpoint (.crkm)")->required();
  train_emb->add_option("--epochs", ecfg.epochs, "Epochs")->capture_default_str();
  train_emb->add_option("--lr", ecfg.lr, "Adam learning rate")->capture_default_str();
  train_emb->add_option("--batch-size", ecfg.batch_size, "Pieces of <= 100 frames per batch")
      ->capture_default_str();
  train_emb->add_option("--dropout", ecfg.dropout, "Dropout rate")->capture_default_str();
  train_emb->add_option("--heads", emb_heads, "Enabled heads")->capture_default_str();
  train_emb->add_option("--log", emb_log, "JSON-lines metrics log (default stderr)");

  // detect
  std::string det_model, det_wav, det_emb, det_frames = "-", det_intervals;
  InferenceOptions iopt;
  bool det_no_gate = false, det_resample = false;
  std::optional<double> det_creak_thr, det_gate_thr;
  auto *detect = app.add_subcommand("detect", "Frame-level creak detection");
  detect->add_option("--model", det_model, "Checkpoint (.crkm)")->required();
  auto *wav_opt = detect->add_option("--wav", det_wav, "Input WAV");
  auto *emb_opt = detect->add_option("--emb", det_emb, "Input embeddings (.crke)");
  wav_opt->excludes(emb_opt);
  detect->add_option("--frames", det_frames, "Frame TSV output ('-' for stdout)");
  detect->add_option("--intervals", det_intervals, "Creak interval label TSV output");
  detect->add_flag("--no-gate", det_no_gate, "Do not require a voiced prediction for creak");
  detect->add_option("--creak-threshold", det_creak_thr, "Creak probability threshold");
  detect->add_option("--gate-threshold", det_gate_thr, "Voice probability threshold");
  detect->add_flag("--resample", det_resample, "Resample non-16 kHz input");

  // eval
  std::string ev_pred, ev_ref, ev_phones, ev_subset, ev_out = "-";
  std::optional<double> ev_duration;
  auto *eval = app.add_subcommand("eval", "Score creak predictions on the 20 ms grid");
  eval->add_option("--pred", ev_pred, "Predictions: label TSV (creak tier) or frame TSV")->required();
  eval->add_option("--ref", ev_ref, "Reference label TSV (creak tier)")->required();
  eval->add_option("--phones", ev_phones, "Label TSV with a phone tier");
  eval->add_option("--subset", ev_subset, "One subset only")
      ->check(CLI::IsMember({"vowels", "sonorants", "all"}));
  eval->add_option("--duration", ev_duration, "Utterance duration in seconds");
  eval->add_option("--out", ev_out, "JSON report ('-' for stdout)");

  // repro
  std::string rp_work = "creaklab-repro", rp_out = "-", rp_log, rp_heads = "creak,voice,pitch";
  std::size_t rp_n = 60;
  int rp_epochs = 14;
  auto *repro = app.add_subcommand("repro", "Synthesize, train and evaluate end to end");
  repro->add_option("--work", rp_work, "Working directory")->capture_default_str();
  repro->add_option("--n", rp_n, "Corpus size")->capture_default_str()->check(CLI::PositiveNumber);
  repro->add_option("--epochs", rp_epochs, "Training epochs")->capture_default_str();
  repro->add_option("--heads", rp_heads, "Enabled heads")->capture_default_str();
  repro->add_option("--log", rp_log, "JSON-lines metrics log (default stderr)");
  repro->add_option("--out", rp_out, "JSON report ('-' for stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*synth) {
      const CorpusManifest m = make_corpus(synth_n, g.seed, synth_out, g.threads);
      note(g, "wrote " + std::to_string(m.utterances.size()) + " utterances to " + synth_out);
    } else if (*pitch) {
      popt.threads = g.threads;
      const Waveform w = read_wav(pitch_wav, {pitch_resample});
      emit(pitch_out, format_pitch(track_pitch(w, popt)));
    } else if (*baseline) {
      bopt.mode = parse_scan_mode(base_mode);
      bopt.from_s = base_from;
      bopt.to_s = base_to;
      bopt.pitch.threads = g.threads;
      const Waveform w = read_wav(base_wav, {base_resample});
      emit(base_out, format_labels({run_baseline(w, bopt).intervals}));
    } else if (*train_cmd) {
      if (!train_config.empty()) {
        const Bytes b = read_file_bytes(train_config);
        auto j = nlohmann::json::parse(b.begin(), b.end(), nullptr, false);
        if (j.is_discarded()) fail(ErrorKind::BadConfig, train_config + ": invalid JSON");
        tcfg = train_config_from_json(j, tcfg);
      }
      if (train_cmd->count("--heads") || train_config.empty())
        tcfg.heads = HeadSet::parse(train_heads);
      tcfg.seed = g.seed;
      tcfg.validate();
      const CorpusManifest m = read_manifest(train_manifest);
      const std::string dir = manifest_dir(train_manifest);
      CreakModel model(ModelConfig::deepfry(tcfg.heads, derive_seed(g.seed, 0x3D)));
      const auto tr = load_split(m, dir, "train", model.encoder_config(), g.threads);
      const auto va = load_split(m, dir, "val", model.encoder_config(), g.threads);
      LogSink log(train_log, g);
      const TrainResult r = train(model, tr, va, tcfg, log.out);
      save_checkpoint(train_out, r.checkpoint);
      note(g, "best epoch " + std::to_string(r.best_epoch) + ", checkpoint " + train_out);
    } else if (*train_emb) {
      ecfg.heads = HeadSet::parse(emb_heads);
      ecfg.seed = g.seed;
      const auto tr = load_embedding_list(emb_train);
      const auto va = emb_val.empty() ? std::vector<EmbeddingItem>{} : load_embedding_list(emb_val);
      LogSink log(emb_log, g);
      const TrainResult r = train_on_embeddings(tr, va, ecfg, log.out);
      save_checkpoint(emb_out, r.checkpoint);
      note(g, "best epoch " + std::to_string(r.best_epoch) + ", checkpoint " + emb_out);
    } else if (*detect) {
      if (det_wav.empty() == det_emb.empty())
        throw CLI::ValidationError("detect", "exactly one of --wav or --emb is required");
      const CreakModel model = CreakModel::from_checkpoint(load_checkpoint(det_model));
      iopt.gate = !det_no_gate;
      iopt.creak_threshold = det_creak_thr;
      iopt.gate_threshold = det_gate_thr;
      FramePredictions p;
      if (!det_wav.empty()) {
        if (!model.has_encoder())
          fail(ErrorKind::BadConfig, det_model + ": embedding-only model needs --emb");
        p = model.predict(read_wav(det_wav, {det_resample}), iopt);
      } else {
        p = model.classify(read_embeddings(det_emb), iopt);
      }
      emit(det_frames, format_frames(p));
      if (!det_intervals.empty()) emit(det_intervals, format_labels({prediction_intervals(p)}));
    } else if (*eval) {
      // Frame TSVs are recognised by their header.
      const Bytes pred_bytes = read_file_bytes(ev_pred);
      const std::string pred_text(pred_bytes.begin(), pred_bytes.end());
      const bool frame_input = pred_text.rfind(std::string(kFrameHeader), 0) == 0;
      const auto ref_tiers = read_labels(ev_ref);
      std::vector<IntervalTier> phone_tiers;
      if (!ev_phones.empty()) phone_tiers = read_labels(ev_phones);
      const IntervalTier *phones = find_tier(phone_tiers, "phone");
      if (!ev_phones.empty() && phones == nullptr)
        fail(ErrorKind::InvalidInput, ev_phones + ": no 'phone' tier");

      double duration = 0.0;
      for (const auto &t : ref_tiers) duration = std::max(duration, t.end_time());
      if (phones) duration = std::max(duration, phones->end_time());
      std::vector<bool> grid;
      if (frame_input) {
        const FrameStream fs = parse_frames(pred_text, ev_pred);
        duration = ev_duration.value_or(std::max(duration, fs.duration_s()));
        grid = to_eval_grid(fs.creak, fs.frame_hop_ms, duration);
      } else {
        const auto pred_tiers = parse_labels(pred_text, ev_pred);
        const IntervalTier *pc = find_tier(pred_tiers, "creak");
        if (pc) duration = std::max(duration, pc->end_time());
        duration = ev_duration.value_or(duration);
        if (!(duration > 0.0))
          fail(ErrorKind::EmptyPrediction, "cannot infer a duration; pass --duration");
        grid = rasterize_tier(pc, eval_grid_size(duration));
      }
      const auto ref = rasterize_tier(find_tier(ref_tiers, "creak"), grid.size());
      std::vector<PhoneSubset> subsets;
      if (!ev_subset.empty()) subsets.push_back(parse_subset(ev_subset));
      else if (phones) subsets.assign(kAllSubsets.begin(), kAllSubsets.end());
      else subsets.push_back(PhoneSubset::All);
      EvalReport report;
      for (PhoneSubset s : subsets) report.add(s, score(grid, ref, phones, s).counts);
      emit(ev_out, to_json(report, subsets).dump(2) + "\n");
    } else if (*repro) {
      ReproOptions ro;
      ro.seed = g.seed;
      ro.n = rp_n;
      ro.work_dir = rp_work;
      ro.threads = g.threads;
      ro.train.epochs = rp_epochs;
      ro.train.heads = HeadSet::parse(rp_heads);
      LogSink log(rp_log, g);
      ro.log = log.out;
      emit(rp_out, run_repro(ro).dump(2) + "\n");
    }
  } catch (const CLI::ValidationError &e) {
    std::cerr << "creaklab: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error &e) {
    std::cerr << "creaklab: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception &e) {
    std::cerr << "creaklab: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
