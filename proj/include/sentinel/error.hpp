// Copyright 2026 The Sentinel Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
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

namespace sentinel {

enum class ErrorKind {
  kInvalidInput,
  kInvalidState,
  kConfig,
  kResource,
  kIo,
  kFormat,
  kValidation,
  kKey,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidInput: return "InvalidInput";
    case ErrorKind::kInvalidState: return "InvalidState";
    case ErrorKind::kConfig: return "ConfigError";
    case ErrorKind::kResource: return "ResourceError";
    case ErrorKind::kIo: return "IoError";
    case ErrorKind::kFormat: return "FormatError";
    case ErrorKind::kValidation: return "ValidationError";
    case ErrorKind::kKey: return "KeyError";
  }
  return "Error";
}

// Base of every exception thrown by the library. Callers that only care about
// the category can catch Error and switch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define SENTINEL_DEFINE_ERROR(Name, Kind)                               \
  class Name : public Error {                                           \
   public:                                                              \
    explicit Name(const std::string& what) : Error(ErrorKind::Kind, what) {} \
  };

SENTINEL_DEFINE_ERROR(InvalidInput, kInvalidInput)
SENTINEL_DEFINE_ERROR(InvalidState, kInvalidState)
SENTINEL_DEFINE_ERROR(ConfigError, kConfig)
SENTINEL_DEFINE_ERROR(ResourceError, kResource)
SENTINEL_DEFINE_ERROR(IoError, kIo)
SENTINEL_DEFINE_ERROR(FormatError, kFormat)
SENTINEL_DEFINE_ERROR(ValidationError, kValidation)
SENTINEL_DEFINE_ERROR(KeyError, kKey)

#undef SENTINEL_DEFINE_ERROR

}  // namespace sentinel
