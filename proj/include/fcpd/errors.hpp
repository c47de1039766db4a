#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fcpd {

enum class ErrorKind {
  InvalidConfiguration,
  InsufficientData,
  InvalidData,
  MissingFeature,
  Query,
};

std::string_view to_string(ErrorKind kind);

/// Base of every error thrown by the library. The kind drives CLI exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class InvalidConfiguration : public Error {
 public:
  explicit InvalidConfiguration(const std::string& message)
      : Error(ErrorKind::InvalidConfiguration, message) {}
};

class InsufficientData : public Error {
 public:
  explicit InsufficientData(const std::string& message) : Error(ErrorKind::InsufficientData, message) {}
};

class InvalidData : public Error {
 public:
  explicit InvalidData(const std::string& message) : Error(ErrorKind::InvalidData, message) {}
};

class MissingFeature : public Error {
 public:
  MissingFeature(const std::string& feature, const std::string& message)
      : Error(ErrorKind::MissingFeature, message), feature_(feature) {}

  const std::string& feature() const noexcept { return feature_; }

 private:
  std::string feature_;
};

enum class QueryErrorKind {
  Syntax,
  UndeclaredReference,
  ArityMismatch,
  DuplicateName,
  InvalidParameter,
  Structure,
};

std::string_view to_string(QueryErrorKind kind);

/// Problem in a `.fcq` query document. Line and column are 1-based and point
/// into the offending token; both are 0 for whole-document problems.
class QueryError : public Error {
 public:
  QueryError(QueryErrorKind kind, std::size_t line, std::size_t column, const std::string& message);

  QueryErrorKind query_kind() const noexcept { return query_kind_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  QueryErrorKind query_kind_;
  std::size_t line_;
  std::size_t column_;
};

}  // namespace fcpd
