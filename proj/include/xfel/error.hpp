#pragma once

#include <stdexcept>
#include <string>

namespace xfel {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define XFEL_ERROR(Name)                 \
  class Name : public Error {            \
   public:                               \
    using Error::Error;                  \
  };

XFEL_ERROR(InvalidGrid)
XFEL_ERROR(GridMismatch)
XFEL_ERROR(InvalidArgument)
XFEL_ERROR(ResolutionError)
XFEL_ERROR(NoCrossing)
XFEL_ERROR(NoMaximum)
XFEL_ERROR(ConvergenceError)
XFEL_ERROR(Infeasible)
XFEL_ERROR(ExperimentFailure)
XFEL_ERROR(IoError)

#undef XFEL_ERROR

// Carries the offending line (0 when the problem is not tied to one line).
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace xfel
