#pragma once

#include <stdexcept>
#include <string>

namespace lkr {

// Thrown when an iterative evaluation cannot reach its tolerance or a fit
// degenerates.  The CLI maps this to exit code 2.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lkr
