#pragma once

#include <stdexcept>
#include <string>

namespace dmcore {

// Bad user input or parameter outside a documented precondition. CLI exit 2.
struct validation_error : std::runtime_error {
  explicit validation_error(const std::string& msg) : std::runtime_error(msg) {}
};

// An enumeration guard (combinatorial size cap) was exceeded. CLI exit 3.
struct guard_error : std::runtime_error {
  explicit guard_error(const std::string& msg) : std::runtime_error(msg) {}
};

// An internal consistency check failed (e.g. a ball did not decompose into
// whole subtrees). Indicates a bug, not bad input. CLI exit 1.
struct internal_error : std::logic_error {
  explicit internal_error(const std::string& msg) : std::logic_error(msg) {}
};

}  // namespace dmcore
