#pragma once

#include <stdexcept>
#include <string>

namespace elrag {

// Error taxonomy mirrored by the CLI exit codes: config errors exit 2,
// data errors exit 3, transport errors exit 4.

class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

class DataError : public std::runtime_error {
public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

class TransportError : public std::runtime_error {
public:
  explicit TransportError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace elrag
