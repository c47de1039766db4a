#include "fcpd/errors.hpp"

namespace fcpd {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidConfiguration:
      return "invalid-configuration";
    case ErrorKind::InsufficientData:
      return "insufficient-data";
    case ErrorKind::InvalidData:
      return "invalid-data";
    case ErrorKind::MissingFeature:
      return "missing-feature";
    case ErrorKind::Query:
      return "query";
  }
  return "unknown";
}

std::string_view to_string(QueryErrorKind kind) {
  switch (kind) {
    case QueryErrorKind::Syntax:
      return "syntax";
    case QueryErrorKind::UndeclaredReference:
      return "undeclared-reference";
    case QueryErrorKind::ArityMismatch:
      return "arity-mismatch";
    case QueryErrorKind::DuplicateName:
      return "duplicate-name";
    case QueryErrorKind::InvalidParameter:
      return "invalid-parameter";
    case QueryErrorKind::Structure:
      return "structure";
  }
  return "unknown";
}

namespace {

std::string located(std::size_t line, std::size_t column, std::string_view kind, const std::string& message) {
  std::string out;
  if (line > 0) {
    out += std::to_string(line) + ":" + std::to_string(column) + ": ";
  }
  out += kind;
  out += " error: ";
  out += message;
  return out;
}

}  // namespace

QueryError::QueryError(QueryErrorKind kind, std::size_t line, std::size_t column, const std::string& message)
    : Error(ErrorKind::Query, located(line, column, to_string(kind), message)),
      query_kind_(kind),
      line_(line),
      column_(column) {}

}  // namespace fcpd
