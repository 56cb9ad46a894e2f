#pragma once

#include <stdexcept>
#include <string>

namespace mvfc {

// Malformed or inconsistent input data (files, label vectors, score tables).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid solver or experiment parameters.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace mvfc
