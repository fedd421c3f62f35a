#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bohm {

enum class ErrorKind {
  configuration,
  domain,
  accuracy,
  numerical_instability,
  degenerate_input,
  zero_norm,
  inconsistent_phase,
  scenario,
  validation,
  io,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Single exception type for the library; `kind()` separates the failure
/// classes callers are expected to branch on (the CLI maps them to exit codes).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) fail(kind, what);
}

/// Warning sink. Defaults to stderr; tests and the CLI may redirect it.
using WarningHandler = void (*)(std::string_view message);
void set_warning_handler(WarningHandler handler) noexcept;
void warn(std::string_view message);

}  // namespace bohm
