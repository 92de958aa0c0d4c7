#pragma once

#include <stdexcept>
#include <string>

namespace corrlearn {

enum class ErrorKind {
  kInvalidArgument,
  kParse,
  kValidation,
  kIo,
  kBusy,
  kProtocol,
};

// All recoverable failures in the library surface as this exception; the
// C API maps `kind()` onto its status codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline void require(bool condition, const std::string& what) {
  if (!condition) throw Error(ErrorKind::kInvalidArgument, what);
}

}  // namespace corrlearn
