#pragma once

#include <stdexcept>
#include <string>

namespace subgcn {

// Malformed or inconsistent input data (files, datasets, caches).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite values or infeasible numeric states during computation.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace subgcn
