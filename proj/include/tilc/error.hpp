// Copyright 2026 The tilcurate Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef TILC_ERROR_HPP
#define TILC_ERROR_HPP

#include <stdexcept>
#include <string>

namespace tilc {

enum class ErrorKind {
  Parse,        // malformed input text
  Schema,       // well-formed input missing/invalid fields
  Reference,    // dangling id or unknown tile
  Io,           // unreadable/unwritable file, unsupported raster format
  Config,       // bad option value
  Invariant,    // data violates a type invariant (e.g. box outside patch)
  Contract,     // caller violated an operation precondition
};

/// Base exception for everything the toolkit throws on purpose.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t byte_offset)
      : Error(ErrorKind::Parse, what), byte_offset_(byte_offset) {}
  std::size_t byte_offset() const noexcept { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

#define TILC_DEFINE_ERROR(Name, Kind)                                   \
  class Name : public Error {                                           \
   public:                                                              \
    explicit Name(const std::string& what) : Error(ErrorKind::Kind, what) {} \
  };

TILC_DEFINE_ERROR(SchemaError, Schema)
TILC_DEFINE_ERROR(ReferenceError, Reference)
TILC_DEFINE_ERROR(IoError, Io)
TILC_DEFINE_ERROR(ConfigError, Config)
TILC_DEFINE_ERROR(InvariantError, Invariant)
TILC_DEFINE_ERROR(ContractError, Contract)

#undef TILC_DEFINE_ERROR

}  // namespace tilc

#endif  // TILC_ERROR_HPP
