#pragma once

#include <stdexcept>
#include <string>

namespace rcsp {

/// Invalid or inconsistent configuration (unknown names, bad parameters).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An operation was called in a state where it is not allowed.
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Non-finite or otherwise unusable numeric input.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Persisted record produced by an incompatible config schema.
class VersionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rcsp
