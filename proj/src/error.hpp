// Copyright 2026 The TheftSentry Authors
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

namespace theftsentry {

enum class ErrorKind {
  parse,       // malformed input text
  shape,       // inconsistent or missing dimensions
  domain,      // value outside its admissible range
  parameter,   // invalid argument or infeasible configuration of an operation
  degenerate,  // input carries no usable information (constant, all-zero, ...)
  metric,      // evaluation metric undefined for the given labels
  config,      // run configuration is invalid or incomplete
  io,          // file could not be read or written
  internal,    // invariant violation inside the library
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Exit code the CLI uses for an error of this kind: 2 configuration, 3 data,
/// 4 internal.
int exit_code(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) throw Error(kind, message);
}

}  // namespace theftsentry
