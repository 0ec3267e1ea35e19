#ifndef MODELSEL_ERRORS_H_
#define MODELSEL_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace modelsel {

// Invalid configuration or domain values (CLI exit code 2).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file content. Carries the 1-based line number.
class ParseError : public ValidationError {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what);

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Unreadable or unwritable paths (CLI exit code 3).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace modelsel

#endif  // MODELSEL_ERRORS_H_
