#pragma once

#include <stdexcept>
#include <string>

namespace linflow {

// Malformed input documents. `where` is a field path or "line L, column C".
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& where, const std::string& what)
      : std::runtime_error(where.empty() ? what : where + ": " + what), where_(where) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

// Matrix ingestion refused to guess.
class IngestError : public std::runtime_error {
 public:
  enum class Kind { ClusterAmbiguity, SnapFailure, StructureMismatch };
  IngestError(Kind k, const std::string& what) : std::runtime_error(what), kind_(k) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// Caller violated a documented precondition (NotStable, NotBounded, ...).
class PreconditionError : public std::invalid_argument {
 public:
  PreconditionError(const std::string& tag, const std::string& what)
      : std::invalid_argument(tag + ": " + what), tag_(tag) {}
  const std::string& tag() const { return tag_; }

 private:
  std::string tag_;
};

// A numerical construction could not certify its own output.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& tag, const std::string& what)
      : std::runtime_error(tag + ": " + what), tag_(tag) {}
  const std::string& tag() const { return tag_; }

 private:
  std::string tag_;
};

}  // namespace linflow
