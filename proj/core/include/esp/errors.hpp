#pragma once

#include <stdexcept>

namespace esp {

// Argument outside a function's documented domain (bad degree/order, |t| > 1,
// malformed axes, ...).  Thrown before any computation starts.
class domain_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Runtime numerical failure: iteration did not converge, a mass matrix lost
// positive definiteness, a discretization is too coarse to certify a result,
// or an internal cross-check disagreed.
class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace esp
