#pragma once

#include <stdexcept>
#include <string>

namespace cxnet {

// Malformed input: unreadable files, syntax errors in edge lists or lattices.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Well-formed request that violates an operation's preconditions
// (disconnected graph, out-of-range size, unsatisfiable allocator, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace cxnet
