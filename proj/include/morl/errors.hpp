#pragma once

#include <stdexcept>
#include <string>

namespace morl {

// Invalid configuration: parameter dimensions, unknown or missing keys.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Caller violated an operation's documented usage (empty batch, eps >= 1, ...).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A function was evaluated outside its domain, e.g. a scalarization applied
// to an unprojected return estimate.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Importance weight with a zero-probability denominator.
class DegenerateSupportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Exhaustive enumeration refused because it exceeds the configured budget.
class BudgetExceededError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Log-log fit with fewer than two usable points.
class DegenerateFitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OverflowError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace morl
