#ifndef NTSYM_ERRORS_HPP
#define NTSYM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ntsym {

// Level mismatches and malformed inputs use std::invalid_argument.

/// A finite prefix was asked for a symbol beyond its resolvable depth, or a
/// desk-scale depth bound was exceeded.
struct depth_error : std::out_of_range {
  using std::out_of_range::out_of_range;
};

/// The representation violates a hypothesis the computation relies on,
/// e.g. a probability vector with a zero entry.
struct hypothesis_error : std::domain_error {
  using std::domain_error::domain_error;
};

}  // namespace ntsym

#endif  // NTSYM_ERRORS_HPP
