#pragma once

#include <stdexcept>
#include <string>

namespace evasion {

// Caller supplied arguments that violate an operation's contract.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A search was started from a state the algorithm cannot work from,
// e.g. a starting "negative" point that the oracle labels positive.
class PreconditionViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A guard inside an algorithm fired (iteration cap, collapsed chord, ...).
class InternalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EnvironmentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace evasion
