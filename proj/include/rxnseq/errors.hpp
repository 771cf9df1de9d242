//
// Copyright 2026 the rxnseq authors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rxnseq {

// Base class for all toolkit errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// File system / OS level failures (missing file, unreadable PNG, ...).
class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(what) {}
};

// Malformed input document. Carries a byte offset when known.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what, std::size_t position = npos)
      : Error(what), position_(position) {}

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  bool has_position() const { return position_ != npos; }
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

}  // namespace rxnseq
