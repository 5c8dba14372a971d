#pragma once

#include <stdexcept>
#include <string>

namespace gm {

enum class ErrorKind {
  SelfLoop,
  IndexOutOfRange,
  PreconditionViolated,
  SearchCapExceeded,
  RootCountMismatch,
  CertificateNotFound,
  InvalidDecomposition,
  InvalidLinkage,
  BudgetExceeded,
  NotTight,
  TerminalNotOnBoundary,
  ParameterTooSmall,
  FamilyTooSmall,
  GenerationCapExceeded,
  VitalityValidationFailed,
  CliqueTooSmall,
  ParseError,
};

const char* error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, ErrorKind kind, const char* what) {
  if (!cond) fail(kind, what);
}

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace gm
