/* Copyright 2026 The sereval Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sereval {

enum class Errc {
  kMalformedManifest,
  kEmptyVotes,
  kUnknownLabel,
  kUnsplittable,
  kTransportError,
  kAdapterRefused,
  kEmptyInput,
  kInconsistentVotes,
  kLengthMismatch,
  kUnknownTruthLabel,
  kDimensionMismatch,
  kMissingGroundTruth,
  kIncompleteMatrix,
  kNoHardLabels,
  kConfigError,
};

inline std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::kMalformedManifest: return "MalformedManifest";
    case Errc::kEmptyVotes: return "EmptyVotes";
    case Errc::kUnknownLabel: return "UnknownLabel";
    case Errc::kUnsplittable: return "Unsplittable";
    case Errc::kTransportError: return "TransportError";
    case Errc::kAdapterRefused: return "AdapterRefused";
    case Errc::kEmptyInput: return "EmptyInput";
    case Errc::kInconsistentVotes: return "InconsistentVotes";
    case Errc::kLengthMismatch: return "LengthMismatch";
    case Errc::kUnknownTruthLabel: return "UnknownTruthLabel";
    case Errc::kDimensionMismatch: return "DimensionMismatch";
    case Errc::kMissingGroundTruth: return "MissingGroundTruth";
    case Errc::kIncompleteMatrix: return "IncompleteMatrix";
    case Errc::kNoHardLabels: return "NoHardLabels";
    case Errc::kConfigError: return "ConfigError";
  }
  return "Unknown";
}

// Single exception type for the library; `code()` tells callers what failed.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// Manifest errors carry the offending file, line (1-based, 0 for the
// descriptor itself) and field.
class ManifestError : public Error {
 public:
  ManifestError(std::string file, std::size_t line, std::string field, const std::string& what)
      : Error(Errc::kMalformedManifest,
              file + ":" + std::to_string(line) + " [" + field + "] " + what),
        file_(std::move(file)),
        line_(line),
        field_(std::move(field)) {}

  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::string file_;
  std::size_t line_;
  std::string field_;
};

}  // namespace sereval
