#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fstwfr {

enum class ErrorKind {
  kInvalidArgument,
  kIo,
  kFormat,
  kParse,
  kNotFound,
  kMismatch,
};

std::string_view ToString(ErrorKind kind);

// Every failure the library reports carries a kind so the CLI can emit a
// machine-readable error line.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void Fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

inline void Require(bool condition, const std::string& message) {
  if (!condition) Fail(ErrorKind::kInvalidArgument, message);
}

}  // namespace fstwfr
