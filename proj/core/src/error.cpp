#include "bohm/error.hpp"

#include <atomic>
#include <iostream>

namespace bohm {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::configuration: return "configuration error";
    case ErrorKind::domain: return "domain error";
    case ErrorKind::accuracy: return "accuracy error";
    case ErrorKind::numerical_instability: return "numerical instability";
    case ErrorKind::degenerate_input: return "degenerate input";
    case ErrorKind::zero_norm: return "zero-norm error";
    case ErrorKind::inconsistent_phase: return "inconsistent phase";
    case ErrorKind::scenario: return "scenario error";
    case ErrorKind::validation: return "validation error";
    case ErrorKind::io: return "i/o error";
  }
  return "error";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

namespace {

void default_warning(std::string_view message) {
  std::cerr << "warning: " << message << '\n';
}

std::atomic<WarningHandler> g_warning_handler{&default_warning};

}  // namespace

void set_warning_handler(WarningHandler handler) noexcept {
  g_warning_handler.store(handler ? handler : &default_warning);
}

void warn(std::string_view message) { g_warning_handler.load()(message); }

}  // namespace bohm
