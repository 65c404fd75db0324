/**
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#ifndef XBAR_ERRORS_HPP
#define XBAR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace xbar {

// Value outside the contract of an operation (e.g. conductance not in [0,1]).
class DomainError : public std::runtime_error {
public:
  explicit DomainError(const std::string &msg) : std::runtime_error(msg) {}
};

// Invalid device/table/experiment configuration.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string &msg) : std::runtime_error(msg) {}
};

// Malformed input file; message carries line/row coordinates.
class ParseError : public std::runtime_error {
public:
  explicit ParseError(const std::string &msg) : std::runtime_error(msg) {}
};

// Filesystem failure (open/write).
class IoError : public std::runtime_error {
public:
  explicit IoError(const std::string &msg) : std::runtime_error(msg) {}
};

} // namespace xbar

#endif // XBAR_ERRORS_HPP
