// Copyright 2026 The imgtrans Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace imgtrans {

enum class ErrorKind {
  kInvalidGeometry,
  kInvalidArgument,
  kIo,
  kDecode,
  kBackendUnreachable,
  kMalformedResponse,
  kUnknownImage,
  kMissingFile,
  kUnsupportedPair,
  kContractViolation,
  kInvalidRegion,
  kFontLoad,
  kPartParse,
  kLocatorMismatch,
  kInvalidDeck,
  kUndefinedReference,
  kEmptyCorpus,
  kDataset,
  kConfig,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidGeometry: return "invalid-geometry";
    case ErrorKind::kInvalidArgument: return "invalid-argument";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kDecode: return "decode";
    case ErrorKind::kBackendUnreachable: return "backend-unreachable";
    case ErrorKind::kMalformedResponse: return "malformed-response";
    case ErrorKind::kUnknownImage: return "unknown-image";
    case ErrorKind::kMissingFile: return "missing-file";
    case ErrorKind::kUnsupportedPair: return "unsupported-pair";
    case ErrorKind::kContractViolation: return "contract-violation";
    case ErrorKind::kInvalidRegion: return "invalid-region";
    case ErrorKind::kFontLoad: return "font-load";
    case ErrorKind::kPartParse: return "part-parse";
    case ErrorKind::kLocatorMismatch: return "locator-mismatch";
    case ErrorKind::kInvalidDeck: return "invalid-deck";
    case ErrorKind::kUndefinedReference: return "undefined-reference";
    case ErrorKind::kEmptyCorpus: return "empty-corpus";
    case ErrorKind::kDataset: return "dataset";
    case ErrorKind::kConfig: return "config";
  }
  return "unknown";
}

/// Base exception for every failure raised by the library. The kind is the
/// machine-readable part; what() carries a human-readable message.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised by remote or local model backends. Carries the backend name and an
/// excerpt of the raw payload that could not be used.
class BackendError : public Error {
 public:
  BackendError(ErrorKind kind, std::string backend, const std::string& message,
               std::string payload_excerpt = {})
      : Error(kind, backend + ": " + message +
                        (payload_excerpt.empty() ? std::string()
                                                 : " [payload: " + payload_excerpt + "]")),
        backend_(std::move(backend)),
        payload_(std::move(payload_excerpt)) {}

  const std::string& backend() const noexcept { return backend_; }
  const std::string& payload_excerpt() const noexcept { return payload_; }

 private:
  std::string backend_;
  std::string payload_;
};

inline std::string excerpt(std::string_view payload, std::size_t limit = 200) {
  if (payload.size() <= limit) return std::string(payload);
  return std::string(payload.substr(0, limit)) + "...";
}

/// Non-fatal diagnostics collected by a stage. Functions that can warn take an
/// optional pointer to one of these.
using Warnings = std::vector<std::string>;

inline void warn(Warnings* sink, std::string message) {
  if (sink != nullptr) sink->push_back(std::move(message));
}

}  // namespace imgtrans
