// Copyright 2026 The sparsetopic Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace sparsetopic {

enum class ErrorCode {
  invalid_argument,  // bad parameters, unusable paths, malformed requests
  io,                // file open/read/write failures
  data,              // structurally valid input with unusable content
  numeric,           // non-finite values outside the training loop
  diverged,          // training loss went non-finite
  version,           // checkpoint/config mismatch
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace sparsetopic
