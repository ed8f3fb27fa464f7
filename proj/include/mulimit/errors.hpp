#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace mulimit {

/// A precondition of a public operation was not met by the caller.
class ContractViolation : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

/// A spec object (subshift, family, config field) failed validation.
class ValidationError : public std::invalid_argument {
  public:
    ValidationError(std::string field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

  private:
    std::string field_;
};

/// Raised by the predecessor oracle when the candidate space exceeds its cap.
class EnumerationTooLarge : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
  public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

} // namespace mulimit
