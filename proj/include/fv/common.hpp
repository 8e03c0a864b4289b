#pragma once

#include <stdexcept>
#include <string>

namespace fv {

// Error categories map to CLI exit codes: usage=1, data=2, numeric=3.
enum class ErrorKind { usage = 1, data = 2, numeric = 3 };

class FvError : public std::runtime_error {
 public:
  FvError(ErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail_usage(const std::string& msg) {
  throw FvError(ErrorKind::usage, msg);
}
[[noreturn]] inline void fail_data(const std::string& msg) {
  throw FvError(ErrorKind::data, msg);
}
[[noreturn]] inline void fail_numeric(const std::string& msg) {
  throw FvError(ErrorKind::numeric, msg);
}

}  // namespace fv
