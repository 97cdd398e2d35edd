#pragma once

#include <stdexcept>
#include <string>

namespace pathwise {

// Thrown when an algorithm fails for numerical (as opposed to argument) reasons:
// indefinite circulant embedding, Cholesky pivot breakdown, diverging iteration.
// Domain/validation problems use std::invalid_argument throughout.
class numeric_error : public std::runtime_error {
 public:
  explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pathwise
