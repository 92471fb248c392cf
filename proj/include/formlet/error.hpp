#pragma once

#include <stdexcept>
#include <string>

namespace formlet {

enum class ErrorKind {
  Syntax,
  UnknownPreprocessorVariable,
  UnknownProcedure,
  UnterminatedProcedure,
  RecursionDepthExceeded,
  UndeclaredName,
  DuplicateName,
  BadDeclaration,
  IndexArityViolation,
  InvalidDelta,
  UnboundWildcard,
  BadPattern,
  RepeatDivergence,
  DenominatorVanishesAtZero,
  NonIntegralSeries,
  ExpansionUnsupported,
  DivisionByZero,
  GoldenFormat,
  Io,
  Internal,
};

// All interpreter failures are reported through this type.  `line` is the
// 1-based line in the original source file (0 when no location applies).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message, std::string file = "", int line = 0)
      : std::runtime_error(format(kind, message, file, line)),
        kind_(kind),
        file_(std::move(file)),
        line_(line) {}

  ErrorKind kind() const { return kind_; }
  const std::string& file() const { return file_; }
  int line() const { return line_; }

  static const char* kind_name(ErrorKind k);

 private:
  static std::string format(ErrorKind kind, const std::string& message,
                            const std::string& file, int line);

  ErrorKind kind_;
  std::string file_;
  int line_;
};

}  // namespace formlet
