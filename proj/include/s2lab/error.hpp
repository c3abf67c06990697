#pragma once

#include <stdexcept>

namespace s2lab {

/// Thrown when an argument lies outside an operation's domain
/// (bad index, grid too small, radius out of range, non-finite input).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace s2lab
