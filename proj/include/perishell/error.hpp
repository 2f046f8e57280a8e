#pragma once

#include <stdexcept>
#include <string>

namespace psh {

/// Error categories, kept in sync with the C API status codes and the
/// CLI exit codes (input errors exit 3, invariant failures exit 2).
enum class ErrorKind {
  InvalidArgument,  // bad parameter, unknown name, out-of-range value
  Parse,            // malformed config / JSON
  Invariant,        // a structural invariant check failed
  NotFound,         // missing mode id, file, catalog entry
  Numeric           // solver non-convergence and similar
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) {
  throw Error(kind, msg);
}

}  // namespace psh
