#pragma once

#include <stdexcept>
#include <string>

namespace helba {

struct OverflowError : std::runtime_error {
  explicit OverflowError(const std::string& what) : std::runtime_error(what) {}
};

struct ShapeError : std::runtime_error {
  explicit ShapeError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when an operation would drive a ciphertext's remaining
// multiplicative level below zero. This is the signal that forces
// low-switching designs.
struct DepthExhaustedError : std::runtime_error {
  explicit DepthExhaustedError(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidParams : std::invalid_argument {
  explicit InvalidParams(const std::string& what) : std::invalid_argument(what) {}
};

struct EmptySelectionError : std::runtime_error {
  explicit EmptySelectionError(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct ProtocolError : std::runtime_error {
  explicit ProtocolError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace helba
