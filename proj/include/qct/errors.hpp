#pragma once

#include <stdexcept>
#include <string>

namespace qct {

/// Bad input: out-of-range sites, illegal basis/model combinations, malformed files.
/// The CLI maps this to exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// Numerical pathology: non-convergence, degeneracy, residues above threshold.
/// The CLI maps this to exit code 1.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qct
