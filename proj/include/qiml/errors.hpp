// Copyright 2026 The qiml Authors
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
/**
 * @file
 * Exception types shared by every qiml module.
 */
#pragma once

#include <stdexcept>
#include <string>

namespace qiml {

/// Base class for all library errors.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Register or tensor size outside the supported range.
class SizeError : public Error {
  public:
    using Error::Error;
};

/// Qubit or element index outside the valid range.
class IndexError : public Error {
  public:
    using Error::Error;
};

/// Inconsistent or malformed arguments (length mismatch, empty mask, ...).
class ArgumentError : public Error {
  public:
    using Error::Error;
};

/// Input outside the mathematical domain of an operation.
class DomainError : public Error {
  public:
    using Error::Error;
};

/// Non-finite values, singular systems, diverged training.
class NumericalError : public Error {
  public:
    using Error::Error;
};

/// Tensor shape does not match what an operation expects.
class ShapeError : public Error {
  public:
    using Error::Error;
};

/// File has the wrong magic number or version tag.
class FormatError : public Error {
  public:
    using Error::Error;
};

/// File payload is shorter than its header announces.
class LengthError : public Error {
  public:
    using Error::Error;
};

/// Structured text could not be parsed; the message names the section.
class ParseError : public Error {
  public:
    using Error::Error;
};

/// File could not be opened, read or written.
class IoError : public Error {
  public:
    using Error::Error;
};

} // namespace qiml
