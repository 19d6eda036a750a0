#pragma once

#include <stdexcept>
#include <string>

namespace trem {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File missing or unreadable.
class FileError : public Error {
 public:
  using Error::Error;
};

/// File parsed but uses a codec/layout the decoder does not handle.
class UnsupportedFormatError : public Error {
 public:
  using Error::Error;
};

/// File ends before the length its headers declare.
class TruncatedFileError : public Error {
 public:
  using Error::Error;
};

/// Caller violated an operation precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace trem
