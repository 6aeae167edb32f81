// Copyright 2026 The klocal Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace klocal {

/// Category of a library failure. The CLI maps these onto exit codes.
enum class ErrorKind {
  kValidation,
  kDimension,
  kDomain,
  kInfeasible,
  kResource,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, std::string field = {})
      : std::runtime_error(message), kind_(kind), field_(std::move(field)) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// Offending input field or argument name; may be empty.
  const std::string& field() const noexcept { return field_; }

 private:
  ErrorKind kind_;
  std::string field_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& message, std::string field = {})
      : Error(ErrorKind::kValidation, message, std::move(field)) {}
};

class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& message, std::string field = {})
      : Error(ErrorKind::kDimension, message, std::move(field)) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& message, std::string field = {})
      : Error(ErrorKind::kDomain, message, std::move(field)) {}
};

class InfeasibleError : public Error {
 public:
  explicit InfeasibleError(const std::string& message, std::string field = {})
      : Error(ErrorKind::kInfeasible, message, std::move(field)) {}
};

class ResourceError : public Error {
 public:
  explicit ResourceError(const std::string& message, std::string field = {})
      : Error(ErrorKind::kResource, message, std::move(field)) {}
};

const char* to_string(ErrorKind kind) noexcept;

}  // namespace klocal
