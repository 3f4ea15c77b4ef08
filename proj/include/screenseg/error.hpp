#pragma once

#include <stdexcept>
#include <string>

namespace screenseg {

/// Bad or unreadable input: malformed files, out-of-range values, mismatched
/// dimensions. The CLI maps this to exit code 1.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An internal invariant failed. The CLI maps this to exit code 2.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline void check_invariant(bool ok, const std::string& what) {
  if (!ok) throw InvariantError(what);
}

}  // namespace screenseg
