/* SPDX-FileCopyrightText: Copyright (c) 2026 the irlw authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace irlw {

/// Base class of all errors thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shape or size mismatch between grids / operators.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Invalid scalar parameter (negative variance, tau <= 0, malformed range, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent or incomplete solver / experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// File I/O or parse failure; the message names the offending file.
class IoError : public Error {
 public:
  using Error::Error;
};

/// An iterate left the representable range (NaN/Inf or magnitude > 1e100).
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, std::size_t iteration)
      : Error(what), iteration_(iteration) {}

  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

}  // namespace irlw
