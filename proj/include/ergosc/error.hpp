#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ergosc {

using cplx = std::complex<double>;

enum class ErrorKind {
  NonBijective,
  NotUnimodular,
  NotMeasurePreserving,
  DomainMismatch,
  OutOfDomain,
  BadParameter,
  QuadratureFailure,
  BadExponent,
  IndexOutOfRange,
  DegenerateFit,
  BoundViolated,
  UnknownExperiment,
  ConfigInvalid,
  ParseError,
  IoFailure,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonBijective: return "NonBijective";
    case ErrorKind::NotUnimodular: return "NotUnimodular";
    case ErrorKind::NotMeasurePreserving: return "NotMeasurePreserving";
    case ErrorKind::DomainMismatch: return "DomainMismatch";
    case ErrorKind::OutOfDomain: return "OutOfDomain";
    case ErrorKind::BadParameter: return "BadParameter";
    case ErrorKind::QuadratureFailure: return "QuadratureFailure";
    case ErrorKind::BadExponent: return "BadExponent";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::DegenerateFit: return "DegenerateFit";
    case ErrorKind::BoundViolated: return "BoundViolated";
    case ErrorKind::UnknownExperiment: return "UnknownExperiment";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool ok, ErrorKind kind, const std::string& what) {
  if (!ok) fail(kind, what);
}

}  // namespace ergosc
