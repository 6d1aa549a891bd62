#pragma once

#include <stdexcept>
#include <string>

namespace roledet {

/// Malformed user input: bad files, unknown labels, invalid configuration.
/// The CLI maps these to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public InputError {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : InputError(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class SpanError : public InputError {
 public:
  SpanError(const std::string& document_id, const std::string& what)
      : InputError("document '" + document_id + "': " + what), document_id_(document_id) {}

  const std::string& document_id() const { return document_id_; }

 private:
  std::string document_id_;
};

class UnknownRoleError : public InputError {
 public:
  explicit UnknownRoleError(const std::string& label)
      : InputError("unknown role label '" + label + "'") {}
};

/// Training produced NaN/Inf. Carries enough context to locate the update.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace roledet
