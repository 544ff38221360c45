#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace xrreq {

// Raised when an argument lies outside the domain of a model (negative
// sizes, zero refresh rates, probabilities outside [0, 1], ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A model was handed a configuration it cannot evaluate, e.g. a GOP
// bitrate request without per-frame-type compression factors.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Unknown registry key. The message lists every valid key.
class LookupError : public std::out_of_range {
 public:
  LookupError(const std::string& what_key, std::vector<std::string> valid_keys);

  const std::vector<std::string>& valid_keys() const { return valid_keys_; }

 private:
  std::vector<std::string> valid_keys_;
};

// Malformed profile or trace document. `line` is 0 when the failure is
// structural rather than syntactic; `field` holds a JSON path when known.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::string field, int line = 0);

  const std::string& field() const { return field_; }
  int line() const { return line_; }

 private:
  std::string field_;
  int line_ = 0;
};

// Filesystem failures, always carrying the offending path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace xrreq
