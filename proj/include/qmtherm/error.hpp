#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qmtherm {

enum class ErrorKind {
  InvalidInput,
  NotPositiveSemidefinite,
  NotCompletelyPositive,
  MalformedInstrument,
  MalformedProcess,
  AmbiguousClassification,
  ThirdLawObstruction,
  InternalInconsistency,
  ParseError,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries one of the kinds above so the
/// CLI can map it onto an exit code without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace qmtherm
