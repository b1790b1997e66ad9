#pragma once

#include <stdexcept>
#include <string>

namespace anonkit {

/// Bad inputs, flags, schemas or configs: everything that can be rejected
/// before any real work starts. The CLI maps this to exit code 1.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace anonkit
