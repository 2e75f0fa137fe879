// creaklab/error.hpp

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

#ifndef CREAKLAB_ERROR_HPP_
#define CREAKLAB_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace creaklab {

/// Every failure the library reports carries one of these kinds, so callers
/// (and the CLI's exit-code mapping) can branch without parsing messages.
enum class ErrorKind {
  InvalidInput,
  IoError,
  // file formats
  NotWav,
  UnsupportedFormat,
  RateMismatch,
  ParseError,
  OverlapError,
  BadMagic,
  TruncatedFile,
  VersionUnsupported,
  ParamCountMismatch,
  // signal processing
  InvalidRange,
  TooShort,
  EmptyTrack,
  // autograd
  ShapeMismatch,
  EmptyMask,
  NonScalarLoss,
  NonFinite,
  // model / training / eval
  BadConfig,
  DimMismatch,
  GridMismatch,
  LabelContradiction,
  EmptyDataset,
  DivergedLoss,
  MixedDims,
  EmptyPrediction,
  BadSpec,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::NotWav: return "NotWav";
    case ErrorKind::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorKind::RateMismatch: return "RateMismatch";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::OverlapError: return "OverlapError";
    case ErrorKind::BadMagic: return "BadMagic";
    case ErrorKind::TruncatedFile: return "TruncatedFile";
    case ErrorKind::VersionUnsupported: return "VersionUnsupported";
    case ErrorKind::ParamCountMismatch: return "ParamCountMismatch";
    case ErrorKind::InvalidRange: return "InvalidRange";
    case ErrorKind::TooShort: return "TooShort";
    case ErrorKind::EmptyTrack: return "EmptyTrack";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::EmptyMask: return "EmptyMask";
    case ErrorKind::NonScalarLoss: return "NonScalarLoss";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::BadConfig: return "BadConfig";
    case ErrorKind::DimMismatch: return "DimMismatch";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::LabelContradiction: return "LabelContradiction";
    case ErrorKind::EmptyDataset: return "EmptyDataset";
    case ErrorKind::DivergedLoss: return "DivergedLoss";
    case ErrorKind::MixedDims: return "MixedDims";
    case ErrorKind::EmptyPrediction: return "EmptyPrediction";
    case ErrorKind::BadSpec: return "BadSpec";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string &message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string &message) {
  throw Error(kind, message);
}

}  // namespace creaklab

#endif  // CREAKLAB_ERROR_HPP_
