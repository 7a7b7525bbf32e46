#pragma once

#include <stdexcept>
#include <string>

namespace lexcourt {

/// Input that is well-formed on disk but violates a data contract
/// (unknown ids in qrels, empty case files, empty collections).
class ValidationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Missing or unreadable files, corrupt index files.
class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A caller passed a parameter outside its documented domain.
class ArgumentError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace lexcourt
