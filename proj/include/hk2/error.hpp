#pragma once

#include <stdexcept>

namespace hk2 {

// The library reports failures through exceptions only; the CLI maps the
// types below onto its exit codes.

struct parse_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// q^r exceeded the configured limit: instance too large.
struct size_limit_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A persisted record disagrees with a freshly computed or stored value.
struct cache_conflict_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An exact identity that must hold failed.  Either an implementation bug or
// a wrong certificate; never ignorable.
struct identity_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Caller violated an operation's stated precondition.
struct precondition_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numeric iteration exhausted its budget before reaching tolerance.
struct convergence_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace hk2
