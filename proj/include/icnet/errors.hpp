// Copyright (c) icnet contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace icnet {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Vector or box dimension does not match what an operation expects.
class DimensionError : public Error {
  public:
    using Error::Error;
};

/// Malformed expression text. `position()` is a 0-based byte offset.
class ParseError : public Error {
  public:
    ParseError(const std::string& message, std::size_t position)
        : Error(message + " at position " + std::to_string(position)), position_(position) {}

    [[nodiscard]] std::size_t position() const { return position_; }

  private:
    std::size_t position_;
};

/// Network graph or document is structurally invalid. Carries the offending
/// node id when one exists.
class GraphError : public Error {
  public:
    GraphError(const std::string& message, std::int64_t node = -1)
        : Error(node >= 0 ? "node " + std::to_string(node) + ": " + message : message), node_(node) {}

    [[nodiscard]] std::int64_t node() const { return node_; }

  private:
    std::int64_t node_;
};

class SchemaError : public GraphError {
  public:
    using GraphError::GraphError;
};

class CycleError : public GraphError {
  public:
    using GraphError::GraphError;
};

class ArityError : public GraphError {
  public:
    using GraphError::GraphError;
};

/// A sampling or enumeration budget would be exceeded.
class BudgetExceeded : public Error {
  public:
    using Error::Error;
};

} // namespace icnet
