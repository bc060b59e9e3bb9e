// Copyright 2026 The Multi-Score Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace multiscore {

/// Raised when inputs violate a documented precondition (bad data, bad
/// configuration, mismatched sets). Maps to CLI exit code 1.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a file cannot be opened, read, or written. Maps to CLI exit
/// code 2.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace multiscore
