#pragma once
#include <stdexcept>
#include <string>

namespace dgflow {

// Bad usage: unknown names, incompatible scheme/gradient pairings, malformed
// input files. The CLI maps this to exit code 1.
struct ConfigError : std::invalid_argument {
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// Runtime numerical failure: divergent solves, singular matrices, states
// leaving the domain of H. The CLI maps this to exit code 2.
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

struct DomainError : NumericalError {
  explicit DomainError(const std::string& what) : NumericalError(what) {}
};

} // namespace dgflow
