// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace darklight {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed, truncated or otherwise unreadable file contents.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// An argument violates an operation's precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure (singular system, non-finite loss).
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace darklight
