#pragma once

#include <stdexcept>
#include <string>

namespace landau_ee {

// Precondition violated by the caller (bad argument, unsupported domain).
class DomainError : public std::invalid_argument {
 public:
  explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

// A configured size cap (grid nodes, matrix dimension, K) would be exceeded.
class ResourceError : public std::runtime_error {
 public:
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

class ConvergenceError : public std::runtime_error {
 public:
  explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace landau_ee
