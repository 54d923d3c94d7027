#pragma once

#include <stdexcept>
#include <string>

namespace credit_transfer {

/// Malformed, missing or degenerate input data (files, columns, labels).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// A fit or factorization that cannot produce a usable result.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace credit_transfer
