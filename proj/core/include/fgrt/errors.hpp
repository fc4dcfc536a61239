// Error types shared across the library. The CLI maps these onto exit
// codes: ConfigError -> 1, DataError -> 2, anything else -> 3.
#pragma once

#include <stdexcept>
#include <string>

namespace fgrt {

// Invalid configuration value (flag out of range, bad axis list, ...).
class ConfigError : public std::invalid_argument {
public:
  explicit ConfigError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Input-data problem: missing file, missing column, parse error, empty set.
class DataError : public std::runtime_error {
public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Feature with no spread (all values equal). Callers typically drop the
// feature and record it in model metadata.
class DegenerateFeatureError : public std::runtime_error {
public:
  explicit DegenerateFeatureError(const std::string& msg)
      : std::runtime_error(msg) {}
};

// Partition violates the interleaved ordering required by encode(), or an
// encoded vector cannot be decoded (all-zero increments).
class EncodingError : public std::invalid_argument {
public:
  explicit EncodingError(const std::string& msg)
      : std::invalid_argument(msg) {}
};

// Rule condition references a feature or term that does not exist.
class MalformedRuleError : public std::out_of_range {
public:
  explicit MalformedRuleError(const std::string& msg)
      : std::out_of_range(msg) {}
};

}  // namespace fgrt
