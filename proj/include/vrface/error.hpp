#pragma once

#include <stdexcept>
#include <string>

namespace vrface {

enum class ErrorKind {
  EmptyRoleSubset,
  DimensionMismatch,
  DegenerateInput,
  EmptyInput,
  IndexOutOfRange,
  ShapeMismatch,
  CollinearSamples,
  InvalidArgument,
  MalformedFrame,
  Format,
};

const char* to_string(ErrorKind kind);

// All library failures are reported through this exception. The kind lets
// callers (the pipeline's frame-drop policy, the CLI's exit codes) branch
// without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), detail_(what) {}

  ErrorKind kind() const noexcept { return kind_; }
  // Message without the kind prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace vrface
