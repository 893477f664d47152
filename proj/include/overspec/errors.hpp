#pragma once

#include <stdexcept>
#include <string>

namespace overspec {

// Malformed user input: bad instance characters, unparsable programs,
// malformed TM descriptors or JSON documents. Maps to CLI exit code 1.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Program text that does not parse. Carries the byte offset of the failure.
class SyntaxError : public InputError {
 public:
  SyntaxError(const std::string& message, std::size_t position)
      : InputError(message + " at offset " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// Evaluation environment is inconsistent with the program, e.g. an ORACLE
// node names an oracle that is not registered.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A quantity is mathematically undefined for the given inputs
// (all-zero sensitivities, zero gap, ...).
class UndefinedError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Pairwise fit cannot proceed (disconnected comparison graph).
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An internal invariant was observed to fail. Maps to CLI exit code 2.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace overspec
