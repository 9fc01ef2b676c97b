#pragma once

#include <stdexcept>
#include <string>

namespace ave {

// Invalid configuration: unknown selector, bad schedule, impossible condition
// pairing, enumeration cap exceeded without sampling.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller broke an operation's precondition (stepping a terminated episode,
// out-of-range action index, ...).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Rejected gridworld agent move. The scenario passed in is left untouched.
class IllegalActionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite loss during training.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ave
