#pragma once

#include <stdexcept>
#include <string>

namespace trifuse {

/// Invalid or inconsistent configuration (thresholds, weights, layer stacks).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (record files, binary payloads,
/// referential integrity, shape mismatches).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numeric failure: divergent training, degenerate score sets, infeasible fits.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace trifuse
