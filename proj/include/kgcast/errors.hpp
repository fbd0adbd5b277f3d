#pragma once

#include <stdexcept>
#include <string>

namespace kgcast {

// Error taxonomy mirrors the CLI exit-code contract:
//   UsageError -> 1, ValidationError -> 2, IntegrityError -> 3.

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IntegrityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace kgcast
