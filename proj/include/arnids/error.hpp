// Copyright 2026 The arnids Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace arnids {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tensor or parameter shapes do not line up.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Caller violated a precondition (empty batch, bad ratio, ...).
class UsageError : public Error {
 public:
  using Error::Error;
};

/// A file could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Input data disagrees with its schema: bad header, unparseable cell,
/// unknown label.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Training produced a non-finite value.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace arnids
