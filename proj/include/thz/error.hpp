#pragma once

#include <stdexcept>
#include <string>

namespace thz {

/// Precondition violated by an argument (negative distance, empty window, ...).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Input is well formed but carries no usable information (constant slice,
/// all-zero volume).
class DegenerateInputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed file or config contents.
class FormatError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A configuration object breaks one of its own invariants.
class InvariantError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {
inline void require(bool ok, const std::string &what) {
  if (!ok)
    throw DomainError(what);
}
} // namespace detail

} // namespace thz
