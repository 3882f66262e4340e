// Copyright 2026 The OPSAI Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace opsai {

/// Base of every error raised by the library. `code()` is a stable
/// machine-readable tag; the API layer maps it onto HTTP statuses.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

/// Malformed input text. `offset` is the byte position reported by the parser.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error("parse_error", what), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// A value violates an invariant. `field` names the offending location,
/// e.g. `events[seq=3].t_ms`.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& what)
      : Error("validation_error", what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class NotFoundError : public Error {
 public:
  explicit NotFoundError(const std::string& what) : Error("not_found", what) {}
};

/// Request conflicts with stored state (seq gaps, finalized sessions, ...).
class ConflictError : public Error {
 public:
  ConflictError(std::string code, const std::string& what,
                std::optional<std::int64_t> expected_seq = std::nullopt)
      : Error(std::move(code), what), expected_seq_(expected_seq) {}

  std::optional<std::int64_t> expected_seq() const noexcept {
    return expected_seq_;
  }

 private:
  std::optional<std::int64_t> expected_seq_;
};

/// A player action the rules do not allow. `element` is the node or edge id.
class ActionRejected : public Error {
 public:
  ActionRejected(std::string element, const std::string& what)
      : Error("invalid_placement", what), element_(std::move(element)) {}

  const std::string& element() const noexcept { return element_; }

 private:
  std::string element_;
};

/// Stored data failed an integrity check during finalization.
class IntegrityError : public Error {
 public:
  IntegrityError(std::string code, const std::string& what,
                 std::optional<std::int64_t> seq = std::nullopt)
      : Error(std::move(code), what), seq_(seq) {}

  std::optional<std::int64_t> seq() const noexcept { return seq_; }

 private:
  std::optional<std::int64_t> seq_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error("io_error", what) {}
};

}  // namespace opsai
