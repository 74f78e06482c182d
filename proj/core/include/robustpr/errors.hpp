#pragma once

#include <stdexcept>
#include <string>

namespace robustpr {

/// Bad sizes, out-of-range parameters, field or dimension mismatches.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The operation is not defined for the given scalar field.
class UnsupportedField : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Input is well-formed but lacks data the operation needs (noise record,
/// ground truth, ...).
class MissingData : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Malformed instance/report document. The message names the offending key.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace robustpr
