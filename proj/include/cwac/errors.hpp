#pragma once

#include <stdexcept>
#include <string>

namespace cwac {

enum class ErrorCode {
  argument = 1,
  parse,
  structural,
  depth,
  partition,
  contract,
  unknown,
  overflow,
  io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

struct ArgumentError : Error {
  explicit ArgumentError(const std::string& w) : Error(ErrorCode::argument, w) {}
};

// Malformed diagram data; the message names the offending vertex.
struct StructuralError : Error {
  explicit StructuralError(const std::string& w) : Error(ErrorCode::structural, w) {}
};

// An operation needed diagram data deeper than what is materialized
// (or more refinement than the configured budget).
struct DepthError : Error {
  explicit DepthError(const std::string& w) : Error(ErrorCode::depth, w) {}
};

struct PartitionError : Error {
  explicit PartitionError(const std::string& w) : Error(ErrorCode::partition, w) {}
};

// A documented precondition was not certified.
struct ContractError : Error {
  explicit ContractError(const std::string& w) : Error(ErrorCode::contract, w) {}
};

// A precondition could neither be certified nor refuted within the bound.
struct UnknownError : Error {
  explicit UnknownError(const std::string& w) : Error(ErrorCode::unknown, w) {}
};

struct OverflowError : Error {
  explicit OverflowError(const std::string& w) : Error(ErrorCode::overflow, w) {}
};

struct IoError : Error {
  explicit IoError(const std::string& w) : Error(ErrorCode::io, w) {}
};

class ParseError : public Error {
 public:
  ParseError(int line, int column, const std::string& msg)
      : Error(ErrorCode::parse, "line " + std::to_string(line) + ", column " +
                                    std::to_string(column) + ": " + msg),
        line_(line),
        column_(column) {}
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace cwac
