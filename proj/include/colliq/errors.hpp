// errors.hpp — Exception types mapped to CLI exit codes.
#pragma once

#include <stdexcept>
#include <string>

namespace colliq {

// Invalid or inconsistent user input (config files, data tables). Exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A numerical procedure failed to meet its accuracy contract. Exit code 3.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace colliq
